#include "parisi/model.hpp"

#include <algorithm>
#include <cmath>

#include "parisi/errors.hpp"
#include "parisi/rng.hpp"

namespace parisi {

MixtureModel::MixtureModel(int dim, std::vector<std::pair<int, double>> betas, ModelKind kind)
    : dim_(dim), betas_(std::move(betas)), kind_(kind) {
    if (dim < 1 || dim > SymMat::kMaxDim)
        throw ValidationError("MixtureModel: dim outside supported range");
    if (kind == ModelKind::ScalarMixed && dim != 1)
        throw ValidationError("MixtureModel: ScalarMixed requires dim == 1");
    bool any_positive = false;
    for (const auto& [p, beta] : betas_) {
        if (p < 2) throw ValidationError("MixtureModel: mixture powers must satisfy p >= 2");
        if (beta < 0.0) throw ValidationError("MixtureModel: mixture coefficients must be >= 0");
        if (beta > 0.0) any_positive = true;
        max_power_ = std::max(max_power_, p);
    }
    if (!any_positive) throw ValidationError("MixtureModel: at least one beta_p must be positive");
}

double MixtureModel::xi(const SymMat& a) const {
    if (a.dim() != dim_) throw ValidationError("xi: dimension mismatch");
    double total = 0.0;
    for (const auto& [p, beta] : betas_) {
        if (beta == 0.0) continue;
        double s = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) {
                double v = 1.0;
                for (int k = 0; k < p; ++k) v *= a(i, j);
                s += v;
            }
        total += beta * beta * s;
    }
    return total;
}

SymMat MixtureModel::grad_xi(const SymMat& a) const {
    if (a.dim() != dim_) throw ValidationError("grad_xi: dimension mismatch");
    SymMat g(dim_);
    for (const auto& [p, beta] : betas_) {
        if (beta == 0.0) continue;
        const double c = p * beta * beta;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j <= i; ++j) {
                double v = 1.0;
                for (int k = 0; k < p - 1; ++k) v *= a(i, j);
                g.at(i, j) += c * v;
            }
    }
    return g;
}

double MixtureModel::theta(const SymMat& a) const { return dot(a, grad_xi(a)) - xi(a); }

SymMat MixtureModel::gamma_along(const SymMat& a, const SymMat& adot) const {
    if (a.dim() != dim_ || adot.dim() != dim_)
        throw ValidationError("gamma_along: dimension mismatch");
    SymMat g(dim_);
    for (const auto& [p, beta] : betas_) {
        if (beta == 0.0) continue;
        const double c = double(p) * (p - 1) * beta * beta;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j <= i; ++j) {
                double v = 1.0;
                for (int k = 0; k < p - 2; ++k) v *= a(i, j);
                g.at(i, j) += c * v * adot(i, j);
            }
    }
    return g;
}

namespace {

SymMat random_psd(Rng& rng, int dim, double scale) {
    SymMat m(dim);
    for (int col = 0; col < dim; ++col) {
        std::array<double, SymMat::kMaxDim> g{};
        for (int i = 0; i < dim; ++i) g[i] = rng.normal() * scale;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j <= i; ++j) m.at(i, j) += g[i] * g[j];
    }
    return m;
}

} // namespace

AssumptionReport check_assumptions(const MixtureModel& model, int samples, std::uint64_t seed) {
    if (samples < 1) throw ValidationError("check_assumptions: samples must be >= 1");
    const int dim = model.dim();
    AssumptionReport report;
    report.samples = samples;
    report.min_monotone_margin = std::numeric_limits<double>::infinity();
    report.min_second_order_margin = std::numeric_limits<double>::infinity();

    Rng rng(derive_stream(seed, 0xA55));
    const double fd_step = 1e-5;
    const double tol = 1e-8;

    for (int it = 0; it < samples; ++it) {
        // ordered pair b <= a with a = b + increment
        SymMat b = random_psd(rng, dim, 0.4);
        SymMat inc = random_psd(rng, dim, 0.3);
        SymMat a = b + inc;

        const double xi_gap = model.xi(a) - model.xi(b);
        const double grad_gap = min_eigenvalue(model.grad_xi(a) - model.grad_xi(b));
        const double margin = std::min(xi_gap, grad_gap);
        report.min_monotone_margin = std::min(report.min_monotone_margin, margin);
        if (margin < -tol && report.monotone_ok) {
            report.monotone_ok = false;
            report.failure = AssumptionWitness{"gradient monotonicity", margin};
        }

        // second-order condition: central difference of b . grad_xi along a PD direction c
        SymMat c = random_psd(rng, dim, 0.3) + 0.05 * SymMat::identity(dim);
        SymMat dir = random_psd(rng, dim, 0.4);   // the "b" of the condition
        if (dir.frobenius_norm() < 1e-12) continue;
        const double plus = dot(dir, model.grad_xi(a + fd_step * c));
        const double minus = dot(dir, model.grad_xi(a - fd_step * c));
        const double deriv = (plus - minus) / (2.0 * fd_step);
        report.min_second_order_margin = std::min(report.min_second_order_margin, deriv);
        if (deriv <= tol && report.second_order_ok) {
            report.second_order_ok = false;
            if (!report.failure) report.failure = AssumptionWitness{"second-order positivity", deriv};
        }
    }
    return report;
}

} // namespace parisi
