#pragma once

#include <cstdint>
#include <vector>

#include "parisi/pde.hpp"

namespace parisi {

/// Window and sampling parameters for simulating the optimally controlled
/// diffusion associated with a solved equation. The solution is borrowed,
/// not owned; it must outlive the problem.
struct ControlProblem {
    const PdeSolution* solution = nullptr;
    double s = 0.0;
    double t = 1.0;
    std::vector<double> x;
    int n_paths = 4096;
    int n_steps = 256;
    std::uint64_t seed = 1;
};

/// Euler-Maruyama sample of the controlled paths with the feedback control
/// u*(r) = grad Phi(r, X(r)). Per-path integrals are stored so that
/// shifted and scaled controls can be valued on the same noise (common
/// random numbers) without re-simulation.
struct SdeSimulation {
    int dim = 0;
    int n_paths = 0;
    int n_steps = 0;
    double s = 0.0, t = 0.0;
    std::vector<double> start;

    std::vector<double> endpoint;         // n_paths x dim
    std::vector<double> drift_integral;   // n_paths x dim: int alpha gamma u* dr
    std::vector<double> noise_integral;   // n_paths x dim: int sqrt(gamma) dB
    std::vector<double> quad_cost;        // n_paths: int alpha <gamma, u* u*^T> dr
    std::vector<double> control;          // n_paths x n_steps x dim (recorded u*)

    std::vector<double> grad_terminal;    // n_paths x dim: grad Phi(t, X(t))
    std::vector<SymMat> hess_terminal;    // per path: Hess Phi(t, X(t))
    std::vector<SymMat> hess_drift;       // per path: int alpha (H gamma H) dr

    std::vector<double> grad_start;       // grad Phi(s, x)
    SymMat hess_start;

    SymMat alpha_gamma_integral;          // int alpha gamma dr
    double alpha_tr_gamma_integral = 0.0; // int alpha tr(gamma) dr
    int exited_paths = 0;                 // paths that left the box margin at least once
};

SdeSimulation simulate_optimal(const ControlProblem& cp);

struct ControlSpec {
    enum class Kind { Optimal, Shifted, Scaled } kind = Kind::Optimal;
    std::vector<double> shift;   // Shifted: u* + shift
    double factor = 1.0;         // Scaled: factor * u*
};

struct ControlValue {
    double mean = 0.0;
    double stderr_ = 0.0;
};

/// Monte-Carlo value E[Phi(t, x + int alpha gamma u dr + int sqrt(gamma) dB)
/// - (1/2) int alpha <gamma, u u^T> dr] for the recorded control or an
/// affine perturbation of it, on the simulation's noise.
ControlValue control_value(const ControlProblem& cp, const SdeSimulation& sim,
                           const ControlSpec& control);

struct WindowReport {
    double integral = 0.0;       // int_s^t alpha tr(gamma) dr
    double bound = 0.0;          // 1 / C
    bool window_ok = false;      // integral < bound
    bool alpha_positive = false; // alpha(s) > 0
};

/// Quadrature check of the smallness condition under which the optimal
/// control is unique on [s, t]; spectral_bound is the constant C with
/// Hess Phi <= C Id (e.g. sqrt(D) times the measured sup Frobenius norm).
WindowReport uniqueness_window_check(const ControlProblem& cp, double spectral_bound);

struct MartingaleReport {
    std::vector<double> mean_gap;
    std::vector<double> stderr_;
    double max_sigmas = 0.0;   // max |gap| / stderr over components
};

/// E grad Phi(t, X(t)) vs grad Phi(s, x): the feedback control along the
/// optimal path is a martingale, so the gap should vanish within noise.
MartingaleReport gradient_martingale_check(const SdeSimulation& sim);

/// Pathwise Hessian evolution: E[H(t, X(t)) - H(s, x) + int alpha H gamma H dr] = 0
/// componentwise within noise.
MartingaleReport hessian_evolution_check(const SdeSimulation& sim);

} // namespace parisi
