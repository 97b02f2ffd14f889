#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace parisi {

/// Global worker count for parallel maps. 0 means hardware_concurrency.
int parallel_threads();
void set_parallel_threads(int n);

namespace detail {
inline int& thread_count_ref() {
    static int n = 0;
    return n;
}
inline bool& in_parallel_region() {
    thread_local bool flag = false;
    return flag;
}
} // namespace detail

inline int parallel_threads() {
    int n = detail::thread_count_ref();
    if (n <= 0) {
        unsigned hw = std::thread::hardware_concurrency();
        n = hw == 0 ? 1 : static_cast<int>(hw);
    }
    return n;
}

inline void set_parallel_threads(int n) { detail::thread_count_ref() = n; }

/// Chunked parallel map over [0, n). Work items must write to disjoint
/// state so the result is independent of the partition. Nested calls run
/// serially, which keeps worker counts bounded when callers compose.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    if (n == 0) return;
    const int want = parallel_threads();
    if (want <= 1 || n == 1 || detail::in_parallel_region()) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(want), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            detail::in_parallel_region() = true;
            for (std::size_t i = lo; i < hi; ++i) fn(i);
            detail::in_parallel_region() = false;
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace parisi
