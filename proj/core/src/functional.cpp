#include "parisi/functional.hpp"

#include <cmath>
#include <set>

#include "parisi/errors.hpp"
#include "parisi/quadrature.hpp"

namespace parisi {

BaseMeasure tilt(const BaseMeasure& base, const MixtureModel& model, const SymMat& z) {
    if (base.dim() != model.dim() || z.dim() != model.dim())
        throw ValidationError("tilt: dimension mismatch");
    return base.tilted(model.grad_xi(z));
}

double gaussian_average(const GridFn& f, const SymMat& cov, int nodes) {
    const int dim = f.spec().dim;
    if (cov.dim() != dim) throw ValidationError("gaussian_average: dimension mismatch");
    const SymEigen eig = eigen_sym(cov);
    std::vector<int> active;
    for (int d = 0; d < dim; ++d) {
        if (eig.values[d] < -1e-9 * (1.0 + cov.frobenius_norm()))
            throw NumericError("gaussian_average: covariance not PSD");
        if (eig.values[d] > 1e-12) active.push_back(d);
    }
    double origin[SymMat::kMaxDim] = {};
    if (active.empty()) return f.interpolate(std::span<const double>(origin, dim));

    const QuadRule& rule = gauss_hermite_normal(nodes);
    const int nj = static_cast<int>(rule.nodes.size());
    std::vector<int> idx(active.size(), 0);
    double acc = 0.0;
    while (true) {
        double w = 1.0;
        double x[SymMat::kMaxDim] = {};
        for (std::size_t a = 0; a < active.size(); ++a) {
            const int d = active[a];
            const double y = std::sqrt(eig.values[d]) * rule.nodes[idx[a]];
            w *= rule.weights[idx[a]];
            for (int r = 0; r < dim; ++r) x[r] += eig.vector(r, d) * y;
        }
        acc += w * f.interpolate(std::span<const double>(x, dim));
        std::size_t a = 0;
        while (a < active.size() && ++idx[a] == nj) idx[a++] = 0;
        if (a == active.size()) break;
    }
    return acc;
}

namespace {

// int alpha(s) psi(s).gamma(s) ds by per-cell Gauss-Legendre; the
// integrand is polynomial in s on each cell of the refinement by the
// path knots and the CDF jumps, so a fixed high order is exact.
double interaction_integral_direct(const MixtureModel& model, const MatrixPath& psi,
                                   const DiscreteCdf& alpha) {
    DerivedPath derived(model, psi);
    std::set<double> cut_set(alpha.qs().begin(), alpha.qs().end());
    cut_set.insert(psi.knot_times().begin(), psi.knot_times().end());
    std::vector<double> cuts(cut_set.begin(), cut_set.end());
    const int order = std::max(8, model.max_power() / 2 + 2);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b - a < 1e-15) continue;
        const double level = alpha.evaluate(0.5 * (a + b));
        acc += level * integrate_gl(
                           [&](double s) { return dot(psi.value(s), derived.gamma(s)); }, a, b,
                           order);
    }
    return acc;
}

// Telescoped closed form: theta(psi(1)) - sum_l mass_l theta(psi(q_l)).
double interaction_integral_telescoped(const MixtureModel& model, const MatrixPath& psi,
                                       const DiscreteCdf& alpha) {
    double acc = model.theta(psi.value(1.0));
    double prev = 0.0;
    for (std::size_t l = 0; l < alpha.qs().size(); ++l) {
        const double mass = alpha.ms()[l] - prev;
        prev = alpha.ms()[l];
        if (mass > 0.0) acc -= mass * model.theta(psi.value(alpha.qs()[l]));
    }
    return acc;
}

} // namespace

FunctionalValue evaluate_functional(const MixtureModel& model, const MatrixPath& psi,
                                    const DiscreteCdf& alpha, const BaseMeasure& base,
                                    const GridSpec& spec, const FunctionalOptions& opt) {
    if (model.dim() != psi.dim() || model.dim() != base.dim() || model.dim() != spec.dim)
        throw ValidationError("evaluate_functional: dimension mismatch");
    const SymMat z = psi.endpoint();
    const BaseMeasure tilted = tilt(base, model, z);
    DerivedPath derived(model, psi);
    const DiscreteCdf a = alpha.canonicalize();

    const PdeSolution sol = solve_pde(tilted, derived, a, spec, opt.pde);

    FunctionalValue out;
    out.term_phi = gaussian_average(sol.level(0), derived.mu(0.0), opt.eta_nodes);
    out.term_theta = 0.5 * model.theta(z);

    const double direct = interaction_integral_direct(model, psi, a);
    const double closed = interaction_integral_telescoped(model, psi, a);
    if (std::abs(direct - closed) > opt.consistency_tol * (1.0 + std::abs(closed)))
        throw NumericError("evaluate_functional: interaction integral routes disagree (" +
                           std::to_string(direct) + " vs " + std::to_string(closed) + ")");
    out.term_int = -0.5 * closed;

    out.total = out.term_phi + out.term_theta + out.term_int;
    return out;
}

FunctionalValue evaluate_pi(const MixtureModel& model, const StepPath& pi,
                            const BaseMeasure& base, const GridSpec& spec,
                            const FunctionalOptions& opt) {
    auto [psi, alpha] = decompose_pi(pi);
    return evaluate_functional(model, psi, alpha, base, spec, opt);
}

} // namespace parisi
