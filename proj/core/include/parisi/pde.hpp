#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "parisi/grid.hpp"
#include "parisi/measure.hpp"
#include "parisi/paths.hpp"

namespace parisi {

struct PdeOptions {
    int quad_nodes = 21;        // Gauss-Hermite order per axis and level
    double rank_eps = 1e-12;    // covariance eigenvalues below this are inactive
    double psd_slack = 1e-9;    // tolerated negative eigenvalue before erroring
};

/// Pointwise terminal condition log integral exp(x . sigma) on the grid.
GridFn terminal_condition(const BaseMeasure& base, const GridSpec& spec);

/// One backward propagation step of the levelwise recursion:
/// x -> (1/m) log E exp(m f(x + sqrt(cov) g)), plain expectation when m = 0.
/// Implemented as separable Gauss-Hermite convolution in the eigenbasis of
/// cov, in the log domain for m > 0, with linear tail extrapolation.
/// Degenerate covariance directions are skipped exactly.
GridFn propagate_level(const GridFn& f, const SymMat& cov, double m,
                       const PdeOptions& opt = {});

/// Grid box half-width heuristic: 6 sigma_max (1 + sqrt(lambda_max(mu(1)))).
double default_half_width(const BaseMeasure& base, const DerivedPath& derived);

/// Backward solution of the generalized Parisi equation for a step CDF,
/// holding one grid function per level time. Immutable after construction.
class PdeSolution {
public:
    PdeSolution(BaseMeasure base, DerivedPath derived, DiscreteCdf alpha,
                GridSpec spec, PdeOptions opt, std::vector<GridFn> levels,
                std::vector<double> level_times);

    const BaseMeasure& base() const { return base_; }
    const DerivedPath& derived() const { return derived_; }
    const DiscreteCdf& alpha() const { return alpha_; }
    const GridSpec& spec() const { return spec_; }
    const PdeOptions& options() const { return opt_; }

    const std::vector<double>& level_times() const { return times_; }
    const GridFn& level(int l) const { return levels_[l]; }

    /// Grid function at an arbitrary time: stored levels are returned as
    /// copies, interior times propagate once from the level above.
    GridFn at_time(double s) const;

    double value(double s, std::span<const double> x) const;
    std::vector<double> grad(double s, std::span<const double> x) const;
    SymMat hess(double s, std::span<const double> x) const;

private:
    BaseMeasure base_;
    DerivedPath derived_;
    DiscreteCdf alpha_;
    GridSpec spec_;
    PdeOptions opt_;
    std::vector<GridFn> levels_;   // levels_[l] at times_[l], l = 0..K
    std::vector<double> times_;
};

/// Levelwise backward solve; throws NumericError if a covariance increment
/// fails to be PSD (the path/model violate gradient monotonicity).
PdeSolution solve_pde(const BaseMeasure& base, const DerivedPath& derived,
                      const DiscreteCdf& alpha, const GridSpec& spec,
                      const PdeOptions& opt = {});

struct GeneralSolve {
    PdeSolution solution;
    DiscreteCdf alpha_used;
    double approx_distance = 0.0;    // d(alpha_n, alpha)
    double lipschitz_budget = 0.0;   // measured Lip(mu) times the distance
};

/// Solution for a general (non-step) CDF by staircase approximation with
/// n_approx jumps, reporting the induced error budget.
GeneralSolve solve_pde_general(const BaseMeasure& base, const DerivedPath& derived,
                               const std::function<double(double)>& alpha, int n_approx,
                               const GridSpec& spec, const PdeOptions& opt = {});

struct ResidualReport {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    int points = 0;
};

/// Finite-difference residual of the continuous equation
/// d_s Phi + (1/2) <gamma, Hess + a(s) grad grad^T> at flat-piece midpoints
/// and sampled interior grid points. When alpha_cts is absent, the
/// solution's own step CDF supplies a(s) (interior-piece consistency).
ResidualReport pde_residual(const PdeSolution& sol,
                            const std::optional<std::function<double(double)>>& alpha_cts,
                            int max_x_samples, std::uint64_t seed);

/// Largest Frobenius norm of the finite-difference Hessian over a strided
/// scan of the central region |x|_inf <= fraction * half_width. The box
/// is sized with a 6 sigma margin, so the band near the boundary is
/// extrapolation-dominated and excluded from curvature measurements.
double max_hessian_norm(const GridFn& level, int stride = 1, double fraction = 0.5);

struct ExpMartingaleStat {
    double mean = 0.0;
    double stderr_ = 0.0;
    int samples = 0;
};

/// Monte-Carlo estimate of E exp(V(s, x)) where V is the exponential
/// bridge built from the stored levels along a sampled Gaussian path; its
/// expectation is exactly 1 for step CDFs.
ExpMartingaleStat exp_martingale_stat(const PdeSolution& sol, double s,
                                      std::span<const double> x, int n_samples,
                                      std::uint64_t seed);

} // namespace parisi
