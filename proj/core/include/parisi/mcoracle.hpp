#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "parisi/measure.hpp"
#include "parisi/paths.hpp"

namespace parisi {

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::vector<int> widths;
    std::uint64_t seed = 0;
    int replications = 0;
};

/// Nested Monte-Carlo evaluator of the levelwise recursion underlying the
/// backward solution: leaves evaluate the terminal log integral under a
/// tree of Gaussian increments, inner nodes fold with (1/m) log mean exp(m .).
/// Independent of the grid solver; used as a cross-validation oracle.
/// Finite widths bias the folds (downward for m in (0,1]); widths are
/// reported so the bias scale is auditable.
class NestedSampler {
public:
    NestedSampler(DiscreteCdf alpha, DerivedPath derived, BaseMeasure base,
                  std::vector<int> widths, std::uint64_t seed);

    /// Geometric split of a total leaf budget over the levels.
    static std::vector<int> widths_for(const DiscreteCdf& alpha, long leaf_budget);

    const std::vector<int>& widths() const { return widths_; }

    /// Replicated nested estimate of the time-0 solution at x.
    /// Replications run on independent, seed-derived streams.
    McEstimate estimate_phi0(std::span<const double> x, int replications) const;

private:
    double recurse(int level, std::span<double> field, class Rng& rng) const;

    DiscreteCdf alpha_;
    DerivedPath derived_;
    BaseMeasure base_;
    std::vector<int> widths_;
    std::vector<SymMat> sqrt_cov_;   // per level, rank-reduced square roots
    std::uint64_t seed_;
};

} // namespace parisi
