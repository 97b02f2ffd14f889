#include "parisi/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "parisi/errors.hpp"
#include "parisi/parallel.hpp"
#include "parisi/rng.hpp"

namespace parisi {

std::vector<double> project_monotone_box(std::vector<double> m) {
    const std::size_t n = m.size();
    std::vector<double> value(n), weight(n);
    std::vector<std::size_t> size(n);
    std::size_t blocks = 0;
    for (std::size_t i = 0; i < n; ++i) {
        value[blocks] = m[i];
        weight[blocks] = 1.0;
        size[blocks] = 1;
        ++blocks;
        while (blocks > 1 && value[blocks - 2] > value[blocks - 1]) {
            const double w = weight[blocks - 2] + weight[blocks - 1];
            value[blocks - 2] =
                (weight[blocks - 2] * value[blocks - 2] + weight[blocks - 1] * value[blocks - 1]) / w;
            weight[blocks - 2] = w;
            size[blocks - 2] += size[blocks - 1];
            --blocks;
        }
    }
    std::size_t k = 0;
    for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t j = 0; j < size[b]; ++j) m[k++] = std::clamp(value[b], 0.0, 1.0);
    return m;
}

namespace {

DiscreteCdf cdf_from_levels(const std::vector<double>& q_grid, const std::vector<double>& m) {
    std::vector<double> ms(m);
    ms.push_back(1.0);
    return DiscreteCdf(q_grid, ms);
}

void validate_q_grid(const std::vector<double>& q_grid) {
    if (q_grid.size() < 2 || q_grid.front() != 0.0 || q_grid.back() != 1.0)
        throw ValidationError("q_grid must run from 0 to 1");
    for (std::size_t i = 1; i < q_grid.size(); ++i)
        if (q_grid[i] <= q_grid[i - 1])
            throw ValidationError("q_grid must be strictly increasing");
}

} // namespace

MinimizeResult minimize_functional(const MixtureModel& model, const MatrixPath& psi,
                                   const BaseMeasure& base, const OptimizeConfig& cfg,
                                   const GridSpec& spec, const FunctionalOptions& fopt,
                                   const std::vector<double>* initial_levels) {
    validate_q_grid(cfg.q_grid);
    const std::size_t K = cfg.q_grid.size() - 1;

    auto objective = [&](const std::vector<double>& m) {
        return evaluate_functional(model, psi, cdf_from_levels(cfg.q_grid, m), base, spec, fopt);
    };
    auto total = [&](const std::vector<double>& m) { return objective(m).total; };

    std::vector<double> x(K, 0.0);
    if (initial_levels) {
        if (initial_levels->size() != K)
            throw ValidationError("minimize_functional: initial level count mismatch");
        x = project_monotone_box(*initial_levels);
    } else {
        for (std::size_t l = 0; l < K; ++l) x[l] = double(l + 1) / double(K + 1);
    }

    double fx = total(x);
    MinimizeResult result{cdf_from_levels(cfg.q_grid, x), objective(x), {}, false};

    std::vector<double> grad(K, 0.0);
    double step_start = cfg.step0;
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        // central differences with probes clamped into the monotone box
        std::vector<double> lo(K), hi(K);
        for (std::size_t l = 0; l < K; ++l) {
            const double lower = l == 0 ? 0.0 : x[l - 1];
            const double upper = l + 1 == K ? 1.0 : x[l + 1];
            lo[l] = std::max(lower, x[l] - cfg.fd_step);
            hi[l] = std::min(upper, x[l] + cfg.fd_step);
        }
        std::vector<double> fplus(K), fminus(K);
        parallel_for(2 * K, [&](std::size_t j) {
            const std::size_t l = j / 2;
            std::vector<double> probe = x;
            if (j % 2 == 0) {
                probe[l] = hi[l];
                fplus[l] = total(probe);
            } else {
                probe[l] = lo[l];
                fminus[l] = total(probe);
            }
        });
        for (std::size_t l = 0; l < K; ++l)
            grad[l] = hi[l] > lo[l] ? (fplus[l] - fminus[l]) / (hi[l] - lo[l]) : 0.0;

        // projected-gradient stationarity measure at unit step
        std::vector<double> probe = x;
        for (std::size_t l = 0; l < K; ++l) probe[l] -= grad[l];
        probe = project_monotone_box(probe);
        double pg2 = 0.0;
        for (std::size_t l = 0; l < K; ++l) pg2 += (x[l] - probe[l]) * (x[l] - probe[l]);
        const double pg_norm = std::sqrt(pg2);

        result.trace.push_back({iter, fx, pg_norm, x});
        if (pg_norm < cfg.tol_m) {
            result.converged = true;
            break;
        }

        double step = step_start;
        bool moved = false;
        double gain = 0.0;
        for (int ls = 0; ls < cfg.ls_max; ++ls) {
            std::vector<double> cand = x;
            for (std::size_t l = 0; l < K; ++l) cand[l] -= step * grad[l];
            cand = project_monotone_box(cand);
            double decrease = 0.0;
            for (std::size_t l = 0; l < K; ++l) decrease += (x[l] - cand[l]) * grad[l];
            const double fc = total(cand);
            if (fc <= fx - 1e-4 * decrease) {
                gain = fx - fc;
                x = std::move(cand);
                fx = fc;
                moved = true;
                // grow after a first-try acceptance so flat regions are crossed
                step_start = ls == 0 ? std::min(step * 4.0, 1e6) : step;
                break;
            }
            step *= cfg.ls_shrink;
        }
        if (!moved) break;   // stalled line search: return best-so-far, flag stays false
        if (gain < cfg.tol_f) {
            result.converged = true;
            break;
        }
    }

    result.alpha = cdf_from_levels(cfg.q_grid, x);
    result.value = objective(x);
    return result;
}

ConvexityReport certify_convexity(const MixtureModel& model, const MatrixPath& psi,
                                  const BaseMeasure& base, const std::vector<double>& q_grid,
                                  int pairs, std::uint64_t seed, const GridSpec& spec,
                                  const FunctionalOptions& fopt) {
    validate_q_grid(q_grid);
    const std::size_t K = q_grid.size() - 1;
    Rng rng(derive_stream(seed, 0xC0));

    auto random_levels = [&]() {
        std::vector<double> m(K);
        for (auto& v : m) v = rng.uniform();
        std::sort(m.begin(), m.end());
        return m;
    };
    auto total = [&](const std::vector<double>& m) {
        std::vector<double> ms(m);
        ms.push_back(1.0);
        return evaluate_functional(model, psi, DiscreteCdf(q_grid, ms), base, spec, fopt).total;
    };

    ConvexityReport rep;
    rep.pairs = pairs;
    rep.min_slack = std::numeric_limits<double>::infinity();
    for (int p = 0; p < pairs; ++p) {
        std::vector<double> a = random_levels();
        std::vector<double> b = random_levels();
        double sep = 0.0;
        for (std::size_t l = 0; l < K; ++l) sep += std::abs(a[l] - b[l]);
        if (sep < 0.05) {   // keep the pair genuinely distinct
            --p;
            continue;
        }
        std::vector<double> mid(K);
        for (std::size_t l = 0; l < K; ++l) mid[l] = 0.5 * (a[l] + b[l]);
        const double slack = 0.5 * total(a) + 0.5 * total(b) - total(mid);
        rep.slacks.push_back(slack);
        rep.min_slack = std::min(rep.min_slack, slack);
        rep.mean_slack += slack;
    }
    if (!rep.slacks.empty()) rep.mean_slack /= static_cast<double>(rep.slacks.size());
    rep.all_positive = rep.min_slack > 0.0;
    return rep;
}

} // namespace parisi
