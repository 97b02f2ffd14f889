#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "parisi/measure.hpp"
#include "parisi/optimize.hpp"
#include "parisi/paths.hpp"

namespace parisi {

/// Simplex-supported setup: uniform base on the standard basis, the
/// symmetric synchronization path, endpoint Id/D.
struct PottsSetup {
    int dim;
    MixtureModel model;
    BaseMeasure base;
    MatrixPath psi;
    SymMat z;

    bool pure_quadratic() const;
};

PottsSetup make_potts_setup(int dim, std::vector<std::pair<int, double>> betas);

/// Closed-form algebra of gamma in the purely quadratic case:
/// gamma = 2 b2^2 (D Id - AllOnes)/D^2 = (2 b2^2 / D^3) sum_k v_k v_k^T,
/// gamma^2 = (2 b2^2 / D) gamma, gamma w = 0, plus the Hadamard identity
/// psi o psidot = s(D-1)/D^3 Id + (1-s)/D^2 psidot and the exact integer
/// identity sum_k v_k v_k^T = D^2 Id - D AllOnes.
struct GammaAlgebraReport {
    SymMat gamma;
    double err_closed_form = 0.0;
    double err_sum_outer = 0.0;
    double err_square = 0.0;
    double err_kernel = 0.0;
    double err_hadamard = 0.0;
    double err_sum_outer_exact = 0.0;
    bool ok(double tol = 1e-12) const;
};

GammaAlgebraReport potts_gamma_identities(const PottsSetup& setup);

/// For mixtures with some p >= 3: gamma(s) is PD on (0, 1], with the
/// Schur-product lower bound matrix also PD.
struct GammaPdReport {
    double min_eig_gamma = 0.0;        // over sampled s in (0, 1]
    double min_eig_bound = 0.0;        // the Schur lower-bound matrix
    double min_eig_gamma_at_zero = 0.0;
    bool pd_interior = false;
};

GammaPdReport potts_gamma_pd_check(const PottsSetup& setup, int s_samples = 11);

/// Kernel structure of the terminal Hessian: w^T H w = 0, v_k^T H v_k > 0,
/// and (optionally, given a grid) positivity of v_k directions for the
/// solved equation at sampled interior times.
struct DegenerateReport {
    double max_w_quad = 0.0;            // max |w^T H w| over samples
    double min_v_quad = 0.0;            // min_k v_k^T H v_k over samples
    double min_offkernel_quad = 0.0;    // random y not parallel to w
    double min_v_quad_solution = 0.0;   // from the PDE solution, if requested
    bool pde_checked = false;
};

DegenerateReport potts_degenerate_directions(const PottsSetup& setup, int x_samples,
                                             std::uint64_t seed,
                                             const GridSpec* spec = nullptr);

/// Convexity experiment: midpoint slacks on random level pairs, the
/// constant-tilt identity in the quadratic case, and multi-start
/// minimization agreement.
struct PottsExperimentReport {
    ConvexityReport convexity;
    std::optional<double> tilt_shift_error;   // quadratic case only
    double expected_tilt_shift = 0.0;
    double multistart_m_spread = 0.0;
    double multistart_value_spread = 0.0;
    int starts = 0;
};

PottsExperimentReport potts_convexity_experiment(const PottsSetup& setup, int pairs,
                                                 std::uint64_t seed, const GridSpec& spec,
                                                 int starts = 3);

std::vector<double> potts_w(int dim);
std::vector<double> potts_v(int dim, int k);

} // namespace parisi
