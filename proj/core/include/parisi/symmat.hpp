#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace parisi {

/// Dense D x D symmetric matrix with packed lower-triangular storage and
/// value semantics. D is a runtime value bounded by kMaxDim; the intended
/// regime is small D where eigen-decompositions are cheap and exact.
class SymMat {
public:
    static constexpr int kMaxDim = 8;

    SymMat() = default;
    explicit SymMat(int dim);

    static SymMat identity(int dim);
    static SymMat all_ones(int dim);
    static SymMat diagonal(std::span<const double> entries);
    /// Rank-one v v^T.
    static SymMat outer(std::span<const double> v);

    int dim() const { return dim_; }

    double operator()(int i, int j) const { return a_[pack(i, j)]; }
    double& at(int i, int j) { return a_[pack(i, j)]; }

    SymMat& operator+=(const SymMat& o);
    SymMat& operator-=(const SymMat& o);
    SymMat& operator*=(double c);
    friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
    friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
    friend SymMat operator*(SymMat a, double c) { return a *= c; }
    friend SymMat operator*(double c, SymMat a) { return a *= c; }

    double trace() const;
    double frobenius_norm() const;

    /// Entrywise (Hadamard) product.
    SymMat hadamard(const SymMat& o) const;
    /// Entrywise power a_ij^p for integer p >= 0.
    SymMat hadamard_power(int p) const;

    /// Symmetric matrix product m * m (ordinary matrix multiplication).
    SymMat square() const;

    /// y = m x.
    void apply(std::span<const double> x, std::span<double> y) const;

    /// x^T m x.
    double quad_form(std::span<const double> x) const;

    bool same_dim(const SymMat& o) const { return dim_ == o.dim_; }

private:
    static constexpr int pack(int i, int j) {
        return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
    }

    int dim_ = 0;
    std::array<double, kMaxDim*(kMaxDim + 1) / 2> a_{};
};

/// Frobenius inner product sum_ij a_ij b_ij.
double dot(const SymMat& a, const SymMat& b);

struct SymEigen {
    std::vector<double> values;            // ascending
    std::vector<double> vectors;           // column k = eigenvector of values[k], row-major dim x dim
    int dim = 0;

    double vector(int row, int col) const { return vectors[std::size_t(row) * dim + col]; }
};

/// Cyclic Jacobi eigen-decomposition; deterministic and accurate to
/// machine precision at these dimensions.
SymEigen eigen_sym(const SymMat& a);

/// Minimum eigenvalue >= -tol.
bool is_psd(const SymMat& a, double tol = 1e-12);

/// a <= b in the Loewner order, i.e. b - a is PSD within tol.
bool loewner_leq(const SymMat& a, const SymMat& b, double tol = 1e-12);

/// PSD square root; eigenvalues in [-tol, 0) are clamped to zero.
/// Throws NumericError if an eigenvalue is below -tol.
SymMat sqrt_psd(const SymMat& a, double tol = 1e-12);

double min_eigenvalue(const SymMat& a);
double max_eigenvalue(const SymMat& a);

} // namespace parisi
