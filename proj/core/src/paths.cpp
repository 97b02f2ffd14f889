#include "parisi/paths.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "parisi/errors.hpp"

namespace parisi {

namespace {
constexpr double kAtomEps = 1e-9;
}

DiscreteCdf::DiscreteCdf(std::vector<double> qs, std::vector<double> ms)
    : qs_(std::move(qs)), ms_(std::move(ms)) {
    if (qs_.size() != ms_.size() || qs_.size() < 2)
        throw ValidationError("DiscreteCdf: qs and ms must have equal size >= 2");
    if (std::abs(qs_.front()) > 0.0)
        throw ValidationError("DiscreteCdf: first jump location must be 0");
    if (qs_.back() != 1.0)
        throw ValidationError("DiscreteCdf: last jump location must be 1");
    // an atom requested exactly at 0 (duplicate location) is nudged to 0+
    if (qs_.size() > 2 && qs_[1] == 0.0) qs_[1] = kAtomEps;
    for (std::size_t i = 1; i < qs_.size(); ++i) {
        if (qs_[i] <= qs_[i - 1])
            throw ValidationError("DiscreteCdf: jump locations must be strictly increasing");
    }
    if (ms_.back() != 1.0) throw ValidationError("DiscreteCdf: last level must be 1");
    for (std::size_t i = 0; i < ms_.size(); ++i) {
        if (ms_[i] < 0.0 || ms_[i] > 1.0)
            throw ValidationError("DiscreteCdf: levels must lie in [0, 1]");
        if (i > 0 && ms_[i] < ms_[i - 1])
            throw ValidationError("DiscreteCdf: levels must be increasing");
    }
}

DiscreteCdf DiscreteCdf::trivial() { return DiscreteCdf({0.0, 1.0}, {0.0, 1.0}); }

DiscreteCdf DiscreteCdf::one_step(double q, double m) {
    if (q <= 0.0 || q > 1.0) throw ValidationError("DiscreteCdf::one_step: q must lie in (0, 1]");
    if (q == 1.0) return trivial();
    return DiscreteCdf({0.0, q, 1.0}, {0.0, m, 1.0});
}

double DiscreteCdf::evaluate(double s) const {
    if (s >= 1.0) return 1.0;
    std::size_t l = 0;
    while (l + 1 < qs_.size() && qs_[l + 1] <= s) ++l;
    return ms_[l];
}

double DiscreteCdf::quantile(double s) const {
    if (s < 0.0 || s > 1.0) throw ValidationError("quantile: argument outside [0, 1]");
    if (s == 0.0) return qs_.front();
    for (std::size_t l = 0; l < ms_.size(); ++l)
        if (ms_[l] >= s) return qs_[l];
    return qs_.back();
}

DiscreteCdf DiscreteCdf::canonicalize() const {
    std::vector<double> q{qs_.front()};
    std::vector<double> m{ms_.front()};
    for (std::size_t l = 1; l < qs_.size(); ++l) {
        const bool last = (l + 1 == qs_.size());
        if (!last && ms_[l] == m.back()) continue;   // zero-mass interior jump
        q.push_back(qs_[l]);
        m.push_back(ms_[l]);
    }
    return DiscreteCdf(std::move(q), std::move(m));
}

double cdf_distance(const DiscreteCdf& a, const DiscreteCdf& b) {
    std::set<double> cuts(a.qs().begin(), a.qs().end());
    cuts.insert(b.qs().begin(), b.qs().end());
    double acc = 0.0;
    double prev = 0.0;
    for (double c : cuts) {
        if (c > prev) acc += std::abs(a.evaluate(prev) - b.evaluate(prev)) * (c - prev);
        prev = c;
    }
    return acc;
}

double quantile_distance(const DiscreteCdf& a, const DiscreteCdf& b) {
    std::set<double> cuts(a.ms().begin(), a.ms().end());
    cuts.insert(b.ms().begin(), b.ms().end());
    cuts.insert(0.0);
    double acc = 0.0;
    double prev = 0.0;
    for (double c : cuts) {
        if (c > prev) {
            const double mid = 0.5 * (prev + c);
            acc += std::abs(a.quantile(mid) - b.quantile(mid)) * (c - prev);
        }
        prev = c;
    }
    return acc;
}

DiscreteCdf convex_combination(const DiscreteCdf& a, const DiscreteCdf& b, double lambda) {
    if (lambda < 0.0 || lambda > 1.0)
        throw ValidationError("convex_combination: lambda outside [0, 1]");
    std::set<double> cuts(a.qs().begin(), a.qs().end());
    cuts.insert(b.qs().begin(), b.qs().end());
    std::vector<double> qs;
    std::vector<double> ms;
    for (double c : cuts) {
        qs.push_back(c);
        ms.push_back((1.0 - lambda) * a.evaluate(c) + lambda * b.evaluate(c));
    }
    return DiscreteCdf(std::move(qs), std::move(ms)).canonicalize();
}

MatrixPath::MatrixPath(std::vector<double> knot_times, std::vector<SymMat> knot_values,
                       double monotone_tol)
    : times_(std::move(knot_times)), values_(std::move(knot_values)) {
    if (times_.size() != values_.size() || times_.size() < 2)
        throw ValidationError("MatrixPath: need matching knot times/values, at least two");
    if (times_.front() != 0.0 || times_.back() != 1.0)
        throw ValidationError("MatrixPath: knots must span [0, 1]");
    const int d = values_.front().dim();
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (times_[i] <= times_[i - 1])
            throw ValidationError("MatrixPath: knot times must be strictly increasing");
        if (values_[i].dim() != d) throw ValidationError("MatrixPath: knot dimension mismatch");
        if (!is_psd(values_[i] - values_[i - 1], monotone_tol))
            throw ValidationError("MatrixPath: knot values must be increasing in the Loewner order");
    }
}

MatrixPath MatrixPath::potts_star(int dim) {
    if (dim < 2) throw ValidationError("potts_star: requires dim >= 2");
    SymMat start = SymMat::all_ones(dim) * (1.0 / (double(dim) * dim));
    SymMat end = SymMat::identity(dim) * (1.0 / dim);
    return MatrixPath({0.0, 1.0}, {start, end});
}

MatrixPath MatrixPath::linear(const SymMat& z) {
    return MatrixPath({0.0, 1.0}, {SymMat(z.dim()), z});
}

MatrixPath MatrixPath::constant(const SymMat& z) { return MatrixPath({0.0, 1.0}, {z, z}); }

SymMat MatrixPath::value(double s) const {
    s = std::clamp(s, 0.0, 1.0);
    std::size_t i = 0;
    while (i + 2 < times_.size() && times_[i + 1] <= s) ++i;
    const double t = (s - times_[i]) / (times_[i + 1] - times_[i]);
    return values_[i] * (1.0 - t) + values_[i + 1] * t;
}

SymMat MatrixPath::derivative(double s) const {
    s = std::clamp(s, 0.0, 1.0);
    std::size_t i = 0;
    while (i + 2 < times_.size() && times_[i + 1] <= s) ++i;
    return (values_[i + 1] - values_[i]) * (1.0 / (times_[i + 1] - times_[i]));
}

SymMat StepPath::value(double s) const {
    std::size_t idx = 0;
    while (idx < breaks.size() && breaks[idx] < s) ++idx;
    return values[idx];
}

StepPath compose_pi(const MatrixPath& psi, const DiscreteCdf& alpha) {
    const DiscreteCdf a = alpha.canonicalize();
    StepPath pi;
    pi.values.push_back(psi.value(a.qs().front()));
    for (std::size_t l = 1; l < a.qs().size(); ++l) {
        if (a.ms()[l] <= a.ms()[l - 1]) continue;     // empty level interval
        const SymMat v = psi.value(a.qs()[l]);
        if ((v - pi.values.back()).frobenius_norm() == 0.0) continue;   // no actual jump
        pi.breaks.push_back(a.ms()[l - 1]);
        pi.values.push_back(v);
    }
    return pi;
}

std::pair<MatrixPath, DiscreteCdf> decompose_pi(const StepPath& pi) {
    const std::size_t j = pi.breaks.size();
    if (pi.values.size() != j + 1)
        throw ValidationError("decompose_pi: malformed step path");
    for (std::size_t i = 1; i < pi.values.size(); ++i)
        if (!is_psd(pi.values[i] - pi.values[i - 1], 1e-9))
            throw ValidationError("decompose_pi: step path must be increasing");
    if (j == 0) {
        return {MatrixPath::constant(pi.values.front()), DiscreteCdf::trivial()};
    }
    std::vector<double> qs(j + 1);
    std::vector<double> ms(j + 1);
    for (std::size_t l = 0; l <= j; ++l) {
        qs[l] = double(l) / double(j);
        ms[l] = l < j ? pi.breaks[l] : 1.0;
    }
    MatrixPath psi(qs, pi.values);
    return {std::move(psi), DiscreteCdf(std::move(qs), std::move(ms))};
}

DerivedPath::DerivedPath(MixtureModel model, MatrixPath psi)
    : model_(std::move(model)), psi_(std::move(psi)) {
    if (model_.dim() != psi_.dim())
        throw ValidationError("DerivedPath: model and path dimension mismatch");
}

SymMat DerivedPath::mu(double s) const { return model_.grad_xi(psi_.value(s)); }

SymMat DerivedPath::mu_increment(double s, double t) const { return mu(t) - mu(s); }

SymMat DerivedPath::gamma(double s) const {
    return model_.gamma_along(psi_.value(s), psi_.derivative(s));
}

double DerivedPath::lipschitz_mu(int mesh) const {
    double best = 0.0;
    for (int i = 0; i <= mesh; ++i) {
        const double s = double(i) / mesh;
        best = std::max(best, gamma(s).frobenius_norm());
    }
    for (double t : psi_.knot_times()) {
        best = std::max(best, gamma(std::min(t, 1.0 - 1e-12)).frobenius_norm());
        best = std::max(best, gamma(std::max(t, 1e-12)).frobenius_norm());
    }
    return best;
}

} // namespace parisi
