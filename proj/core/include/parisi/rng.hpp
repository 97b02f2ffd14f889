#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace parisi {

/// SplitMix64 step; used to derive independent streams from a base seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based stream derivation: (seed, id, subid) -> starting state.
/// Streams for distinct ids are independent for practical purposes and
/// reproducible across platforms and thread counts.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t id, std::uint64_t subid = 0) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    s ^= 0x2545f4914f6cdd1dULL * (id + 1);
    (void)splitmix64(s);
    s ^= 0x9e3779b97f4a7c15ULL * (subid + 1);
    (void)splitmix64(s);
    return s;
}

/// Small deterministic generator: xoshiro-free, pure splitmix64 chain with
/// explicit Box-Muller normals. Identical output on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1], safe as a log argument.
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; caches the second variate.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u = uniform_pos();
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 2.0 * std::numbers::pi * v;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace parisi
