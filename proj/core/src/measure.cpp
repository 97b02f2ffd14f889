#include "parisi/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parisi/errors.hpp"

namespace parisi {

BaseMeasure::BaseMeasure(int dim, std::vector<Atom> atoms)
    : dim_(dim), atoms_(std::move(atoms)) {
    if (dim < 1 || dim > SymMat::kMaxDim) throw ValidationError("BaseMeasure: bad dim");
    if (atoms_.empty()) throw ValidationError("BaseMeasure: empty measure");
    for (const auto& a : atoms_) {
        if (static_cast<int>(a.point.size()) != dim)
            throw ValidationError("BaseMeasure: atom dimension mismatch");
        if (!(a.weight > 0.0)) throw ValidationError("BaseMeasure: weights must be positive");
        double n2 = 0.0;
        for (double c : a.point) n2 += c * c;
        const double n = std::sqrt(n2);
        if (n > 1.0 + 1e-12)
            throw ValidationError("BaseMeasure: atoms must lie in the closed unit ball");
        max_norm_ = std::max(max_norm_, n);
    }
}

BaseMeasure BaseMeasure::ising() {
    return BaseMeasure(1, {{{1.0}, 0.5}, {{-1.0}, 0.5}});
}

BaseMeasure BaseMeasure::potts_uniform(int dim) {
    if (dim < 2) throw ValidationError("potts_uniform: requires dim >= 2");
    std::vector<Atom> atoms;
    for (int k = 0; k < dim; ++k) {
        std::vector<double> e(dim, 0.0);
        e[k] = 1.0;
        atoms.push_back({std::move(e), 1.0 / dim});
    }
    return BaseMeasure(dim, std::move(atoms));
}

bool BaseMeasure::is_dirac() const {
    for (std::size_t i = 1; i < atoms_.size(); ++i)
        if (atoms_[i].point != atoms_[0].point) return false;
    return true;
}

double BaseMeasure::log_mgf(std::span<const double> x) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& a : atoms_) {
        double e = std::log(a.weight);
        for (int d = 0; d < dim_; ++d) e += x[d] * a.point[d];
        best = std::max(best, e);
    }
    double acc = 0.0;
    for (const auto& a : atoms_) {
        double e = std::log(a.weight);
        for (int d = 0; d < dim_; ++d) e += x[d] * a.point[d];
        acc += std::exp(e - best);
    }
    return best + std::log(acc);
}

void BaseMeasure::log_mgf_gradient(std::span<const double> x, std::span<double> g) const {
    std::vector<double> w(atoms_.size());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        double e = std::log(atoms_[i].weight);
        for (int d = 0; d < dim_; ++d) e += x[d] * atoms_[i].point[d];
        w[i] = e;
        best = std::max(best, e);
    }
    double z = 0.0;
    for (auto& e : w) {
        e = std::exp(e - best);
        z += e;
    }
    for (int d = 0; d < dim_; ++d) g[d] = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        for (int d = 0; d < dim_; ++d) g[d] += w[i] / z * atoms_[i].point[d];
}

SymMat BaseMeasure::log_mgf_hessian(std::span<const double> x) const {
    std::vector<double> w(atoms_.size());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        double e = std::log(atoms_[i].weight);
        for (int d = 0; d < dim_; ++d) e += x[d] * atoms_[i].point[d];
        w[i] = e;
        best = std::max(best, e);
    }
    double z = 0.0;
    for (auto& e : w) {
        e = std::exp(e - best);
        z += e;
    }
    std::vector<double> mean(dim_, 0.0);
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        for (int d = 0; d < dim_; ++d) mean[d] += w[i] / z * atoms_[i].point[d];
    SymMat h(dim_);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const double p = w[i] / z;
        for (int r = 0; r < dim_; ++r)
            for (int c = 0; c <= r; ++c)
                h.at(r, c) += p * (atoms_[i].point[r] - mean[r]) * (atoms_[i].point[c] - mean[c]);
    }
    return h;
}

BaseMeasure BaseMeasure::tilted(const SymMat& tilt) const {
    if (tilt.dim() != dim_) throw ValidationError("tilted: dimension mismatch");
    std::vector<Atom> atoms = atoms_;
    for (auto& a : atoms) {
        const SymMat ss = SymMat::outer(a.point);
        a.weight *= std::exp(-0.5 * dot(tilt, ss));
    }
    return BaseMeasure(dim_, std::move(atoms));
}

} // namespace parisi
