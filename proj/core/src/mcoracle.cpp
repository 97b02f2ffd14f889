#include "parisi/mcoracle.hpp"

#include <cmath>
#include <limits>

#include "parisi/errors.hpp"
#include "parisi/parallel.hpp"
#include "parisi/rng.hpp"

namespace parisi {

NestedSampler::NestedSampler(DiscreteCdf alpha, DerivedPath derived, BaseMeasure base,
                             std::vector<int> widths, std::uint64_t seed)
    : alpha_(alpha.canonicalize()),
      derived_(std::move(derived)),
      base_(std::move(base)),
      widths_(std::move(widths)),
      seed_(seed) {
    const int levels = alpha_.levels();
    if (static_cast<int>(widths_.size()) != levels)
        throw ValidationError("NestedSampler: need one width per level");
    for (int l = 1; l <= levels; ++l) {
        if (widths_[l - 1] < 1 || (alpha_.ms()[l - 1] > 0.0 && widths_[l - 1] < 2))
            throw ValidationError("NestedSampler: widths must be >= 2 on levels with positive exponent");
        sqrt_cov_.push_back(
            sqrt_psd(derived_.mu_increment(alpha_.qs()[l - 1], alpha_.qs()[l]), 1e-9));
    }
}

std::vector<int> NestedSampler::widths_for(const DiscreteCdf& alpha, long leaf_budget) {
    const int levels = alpha.canonicalize().levels();
    const double per = std::pow(double(leaf_budget), 1.0 / levels);
    const int w = std::max(2, static_cast<int>(std::llround(per)));
    return std::vector<int>(levels, w);
}

double NestedSampler::recurse(int level, std::span<double> field, Rng& rng) const {
    const int levels = alpha_.levels();
    if (level == levels) return base_.log_mgf(field);

    const int dim = base_.dim();
    const int n = widths_[level];
    const double m = alpha_.ms()[level];
    const SymMat& root = sqrt_cov_[level];

    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> vals(n);
    double g[SymMat::kMaxDim];
    double dz[SymMat::kMaxDim];
    double saved[SymMat::kMaxDim];
    for (int d = 0; d < dim; ++d) saved[d] = field[d];
    for (int j = 0; j < n; ++j) {
        for (int d = 0; d < dim; ++d) g[d] = rng.normal();
        root.apply(std::span<const double>(g, dim), std::span<double>(dz, dim));
        for (int d = 0; d < dim; ++d) field[d] = saved[d] + dz[d];
        vals[j] = recurse(level + 1, field, rng);
        best = std::max(best, vals[j]);
    }
    for (int d = 0; d < dim; ++d) field[d] = saved[d];

    if (m == 0.0) {
        double acc = 0.0;
        for (double v : vals) acc += v;
        return acc / n;
    }
    double acc = 0.0;
    for (double v : vals) acc += std::exp(m * (v - best));
    return best + std::log(acc / n) / m;
}

McEstimate NestedSampler::estimate_phi0(std::span<const double> x, int replications) const {
    if (replications < 2) throw ValidationError("estimate_phi0: replications must be >= 2");
    if (static_cast<int>(x.size()) != base_.dim())
        throw ValidationError("estimate_phi0: point dimension mismatch");

    std::vector<double> reps(replications);
    parallel_for(static_cast<std::size_t>(replications), [&](std::size_t r) {
        Rng rng(derive_stream(seed_, r));
        double field[SymMat::kMaxDim];
        for (int d = 0; d < base_.dim(); ++d) field[d] = x[d];
        reps[r] = recurse(0, std::span<double>(field, base_.dim()), rng);
    });

    McEstimate est;
    est.widths = widths_;
    est.seed = seed_;
    est.replications = replications;
    for (double v : reps) est.mean += v;
    est.mean /= replications;
    double ss = 0.0;
    for (double v : reps) ss += (v - est.mean) * (v - est.mean);
    est.stderr_ = std::sqrt(ss / (replications - 1.0) / replications);
    return est;
}

} // namespace parisi
