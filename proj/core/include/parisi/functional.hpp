#pragma once

#include "parisi/pde.hpp"

namespace parisi {

/// Three-term decomposition of the functional value:
/// total = term_phi + term_theta + term_int with
///   term_phi   = E Phi(0, sqrt(mu(0)) eta)   (PDE solved on the tilted base)
///   term_theta = theta(z) / 2
///   term_int   = -(1/2) int alpha(s) psi(s) . gamma(s) ds
struct FunctionalValue {
    double total = 0.0;
    double term_phi = 0.0;
    double term_theta = 0.0;
    double term_int = 0.0;
};

struct FunctionalOptions {
    PdeOptions pde{};
    int eta_nodes = 21;              // Hermite order for the time-0 Gaussian integral
    double consistency_tol = 1e-8;   // dual-route tolerance on term_int
};

/// Tilted base measure: atoms reweighted by exp(-(1/2) grad_xi(z) . s s^T).
/// Finite, not renormalized.
BaseMeasure tilt(const BaseMeasure& base, const MixtureModel& model, const SymMat& z);

/// Functional value at (psi, alpha). The interaction integral is computed
/// both by direct quadrature and by the telescoped closed form
/// theta(z) - int theta(psi(r)) d alpha(r); disagreement beyond
/// consistency_tol raises NumericError.
FunctionalValue evaluate_functional(const MixtureModel& model, const MatrixPath& psi,
                                    const DiscreteCdf& alpha, const BaseMeasure& base,
                                    const GridSpec& spec, const FunctionalOptions& opt = {});

/// Value of the composed functional on a step path, by factoring the path
/// into a piecewise-linear component and a step CDF.
FunctionalValue evaluate_pi(const MixtureModel& model, const StepPath& pi,
                            const BaseMeasure& base, const GridSpec& spec,
                            const FunctionalOptions& opt = {});

/// E f(0, sqrt(cov) eta) for a grid function f and standard Gaussian eta,
/// by separable Hermite quadrature along the active eigendirections.
double gaussian_average(const GridFn& f, const SymMat& cov, int nodes);

} // namespace parisi
