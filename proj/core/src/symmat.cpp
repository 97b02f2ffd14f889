#include "parisi/symmat.hpp"

#include <cmath>
#include <string>

#include "parisi/errors.hpp"

namespace parisi {

namespace {
void check_dim(int dim) {
    if (dim < 1 || dim > SymMat::kMaxDim)
        throw ValidationError("SymMat: dim " + std::to_string(dim) + " outside [1, " +
                              std::to_string(SymMat::kMaxDim) + "]");
}
void check_match(const SymMat& a, const SymMat& b, const char* op) {
    if (!a.same_dim(b))
        throw ValidationError(std::string(op) + ": dimension mismatch " +
                              std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
}
} // namespace

SymMat::SymMat(int dim) : dim_(dim) { check_dim(dim); }

SymMat SymMat::identity(int dim) {
    SymMat m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
}

SymMat SymMat::all_ones(int dim) {
    SymMat m(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j <= i; ++j) m.at(i, j) = 1.0;
    return m;
}

SymMat SymMat::diagonal(std::span<const double> entries) {
    SymMat m(static_cast<int>(entries.size()));
    for (int i = 0; i < m.dim(); ++i) m.at(i, i) = entries[i];
    return m;
}

SymMat SymMat::outer(std::span<const double> v) {
    SymMat m(static_cast<int>(v.size()));
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j <= i; ++j) m.at(i, j) = v[i] * v[j];
    return m;
}

SymMat& SymMat::operator+=(const SymMat& o) {
    check_match(*this, o, "SymMat::operator+=");
    for (int i = 0; i < dim_ * (dim_ + 1) / 2; ++i) a_[i] += o.a_[i];
    return *this;
}

SymMat& SymMat::operator-=(const SymMat& o) {
    check_match(*this, o, "SymMat::operator-=");
    for (int i = 0; i < dim_ * (dim_ + 1) / 2; ++i) a_[i] -= o.a_[i];
    return *this;
}

SymMat& SymMat::operator*=(double c) {
    for (int i = 0; i < dim_ * (dim_ + 1) / 2; ++i) a_[i] *= c;
    return *this;
}

double SymMat::trace() const {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double SymMat::frobenius_norm() const { return std::sqrt(dot(*this, *this)); }

SymMat SymMat::hadamard(const SymMat& o) const {
    check_match(*this, o, "SymMat::hadamard");
    SymMat r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j <= i; ++j) r.at(i, j) = (*this)(i, j) * o(i, j);
    return r;
}

SymMat SymMat::hadamard_power(int p) const {
    SymMat r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j <= i; ++j) {
            double base = (*this)(i, j);
            double v = 1.0;
            for (int k = 0; k < p; ++k) v *= base;
            r.at(i, j) = v;
        }
    return r;
}

SymMat SymMat::square() const {
    SymMat r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = 0; k < dim_; ++k) s += (*this)(i, k) * (*this)(k, j);
            r.at(i, j) = s;
        }
    return r;
}

void SymMat::apply(std::span<const double> x, std::span<double> y) const {
    for (int i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
}

double SymMat::quad_form(std::span<const double> x) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) s += x[i] * (*this)(i, j) * x[j];
    return s;
}

double dot(const SymMat& a, const SymMat& b) {
    check_match(a, b, "dot");
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) s += a(i, j) * b(i, j);
    return s;
}

SymEigen eigen_sym(const SymMat& a) {
    const int n = a.dim();
    SymEigen out;
    out.dim = n;
    out.values.resize(n);
    out.vectors.assign(std::size_t(n) * n, 0.0);

    // working full matrix and accumulated rotations
    std::array<double, SymMat::kMaxDim * SymMat::kMaxDim> m{};
    std::array<double, SymMat::kMaxDim * SymMat::kMaxDim> v{};
    auto M = [&](int i, int j) -> double& { return m[std::size_t(i) * n + j]; };
    auto V = [&](int i, int j) -> double& { return v[std::size_t(i) * n + j]; };
    for (int i = 0; i < n; ++i) {
        V(i, i) = 1.0;
        for (int j = 0; j < n; ++j) M(i, j) = a(i, j);
    }

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += M(p, q) * M(p, q);
        if (off < 1e-30 * (1.0 + a.frobenius_norm())) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = M(p, q);
                if (apq == 0.0) continue;
                const double tau = (M(q, q) - M(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = M(k, p), mkq = M(k, q);
                    M(k, p) = c * mkp - s * mkq;
                    M(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = M(p, k), mqk = M(q, k);
                    M(p, k) = c * mpk - s * mqk;
                    M(q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    // sort ascending, permuting columns with values
    std::array<int, SymMat::kMaxDim> order{};
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (M(order[j], order[j]) < M(order[i], order[i])) std::swap(order[i], order[j]);
    for (int k = 0; k < n; ++k) {
        out.values[k] = M(order[k], order[k]);
        for (int r = 0; r < n; ++r) out.vectors[std::size_t(r) * n + k] = V(r, order[k]);
    }
    return out;
}

double min_eigenvalue(const SymMat& a) { return eigen_sym(a).values.front(); }
double max_eigenvalue(const SymMat& a) { return eigen_sym(a).values.back(); }

bool is_psd(const SymMat& a, double tol) {
    if (tol < 0) throw ValidationError("is_psd: tol must be >= 0");
    return min_eigenvalue(a) >= -tol;
}

bool loewner_leq(const SymMat& a, const SymMat& b, double tol) {
    check_match(a, b, "loewner_leq");
    return is_psd(b - a, tol);
}

SymMat sqrt_psd(const SymMat& a, double tol) {
    const SymEigen eig = eigen_sym(a);
    const int n = a.dim();
    SymMat r(n);
    for (int k = 0; k < n; ++k) {
        double lam = eig.values[k];
        if (lam < -tol)
            throw NumericError("sqrt_psd: matrix has eigenvalue " + std::to_string(lam) +
                               " below -tol");
        if (lam < 0.0) lam = 0.0;
        const double s = std::sqrt(lam);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) r.at(i, j) += s * eig.vector(i, k) * eig.vector(j, k);
    }
    return r;
}

} // namespace parisi
