#pragma once

#include <cstdint>
#include <vector>

#include "parisi/functional.hpp"

namespace parisi {

struct OptimizeConfig {
    std::vector<double> q_grid;   // full jump locations, 0 = q_0 < ... < q_K = 1
    double tol_f = 1e-9;          // stop on functional decrease below this
    double tol_m = 1e-5;          // stop on projected-gradient norm below this
    int max_iters = 200;
    double fd_step = 1e-3;        // central-difference step in the levels
    double step0 = 1.0;           // initial line-search step
    double ls_shrink = 0.5;
    int ls_max = 25;
};

struct IterRecord {
    int iter = 0;
    double value = 0.0;
    double grad_norm = 0.0;
    std::vector<double> m;
};

struct MinimizeResult {
    DiscreteCdf alpha;
    FunctionalValue value;
    std::vector<IterRecord> trace;
    bool converged = false;
};

/// Euclidean projection onto {0 <= m_0 <= ... <= m_{K-1} <= 1}: isotonic
/// regression by pool-adjacent-violators followed by the box clamp.
std::vector<double> project_monotone_box(std::vector<double> m);

/// Projected gradient descent on the level vector of a step CDF with fixed
/// jump locations. The map m -> functional value is convex on the
/// constraint polytope (level combinations are pointwise CDF combinations),
/// so descent with backtracking converges to the minimizer.
MinimizeResult minimize_functional(const MixtureModel& model, const MatrixPath& psi,
                                   const BaseMeasure& base, const OptimizeConfig& cfg,
                                   const GridSpec& spec, const FunctionalOptions& fopt = {},
                                   const std::vector<double>* initial_levels = nullptr);

struct ConvexityReport {
    int pairs = 0;
    double min_slack = 0.0;    // over distinct sampled pairs, at the midpoint
    double mean_slack = 0.0;
    bool all_positive = false;
    std::vector<double> slacks;
};

/// Midpoint strict-convexity probe over random distinct level vectors on a
/// shared jump grid: slack = (F(a0) + F(a1))/2 - F(mid).
ConvexityReport certify_convexity(const MixtureModel& model, const MatrixPath& psi,
                                  const BaseMeasure& base, const std::vector<double>& q_grid,
                                  int pairs, std::uint64_t seed, const GridSpec& spec,
                                  const FunctionalOptions& fopt = {});

} // namespace parisi
