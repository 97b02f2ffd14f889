#pragma once

#include <utility>
#include <vector>

#include "parisi/model.hpp"
#include "parisi/symmat.hpp"

namespace parisi {

/// Step cumulative distribution function on [0, 1]: jump locations qs and
/// levels ms with 0 = q_0 <= q_1 < ... < q_K = 1 and levels increasing to
/// m_K = 1; the value on [q_l, q_{l+1}) is m_l. Ties in the levels are
/// permitted on input (zero-mass jumps) and removed by canonicalize().
class DiscreteCdf {
public:
    DiscreteCdf(std::vector<double> qs, std::vector<double> ms);

    static DiscreteCdf trivial();                       // single jump at 1
    static DiscreteCdf one_step(double q, double m);    // level m on [q0=0 piece? see impl]

    const std::vector<double>& qs() const { return qs_; }
    const std::vector<double>& ms() const { return ms_; }
    int levels() const { return static_cast<int>(qs_.size()) - 1; }

    double evaluate(double s) const;
    /// Left-continuous inverse (quantile function); quantile(1) == 1.
    double quantile(double s) const;

    /// Remove zero-mass jumps (equal adjacent levels) and duplicate
    /// locations; the result represents the same CDF.
    DiscreteCdf canonicalize() const;

    bool operator==(const DiscreteCdf& o) const { return qs_ == o.qs_ && ms_ == o.ms_; }

private:
    std::vector<double> qs_;
    std::vector<double> ms_;
};

/// L1 distance between two CDFs, integrated exactly piece by piece.
double cdf_distance(const DiscreteCdf& a, const DiscreteCdf& b);

/// Exact integral of |a^{-1} - b^{-1}| over [0, 1].
double quantile_distance(const DiscreteCdf& a, const DiscreteCdf& b);

/// Pointwise convex combination (1-lambda) a + lambda b, exact on the
/// merged jump grid.
DiscreteCdf convex_combination(const DiscreteCdf& a, const DiscreteCdf& b, double lambda);

/// Piecewise-linear increasing matrix path on [0, 1] with fixed endpoint.
/// Knot values must be increasing in the Loewner order; linear
/// interpolation then preserves monotonicity segment by segment.
class MatrixPath {
public:
    MatrixPath(std::vector<double> knot_times, std::vector<SymMat> knot_values,
               double monotone_tol = 1e-9);

    /// The symmetric candidate path for the simplex-supported base:
    /// (s/D) Id + ((1-s)/D^2) AllOnes, endpoint Id/D.
    static MatrixPath potts_star(int dim);
    /// s -> z s in one dimension (or any dimension, linear to z).
    static MatrixPath linear(const SymMat& z);
    static MatrixPath constant(const SymMat& z);

    int dim() const { return values_.front().dim(); }
    const std::vector<double>& knot_times() const { return times_; }
    const std::vector<SymMat>& knot_values() const { return values_; }

    SymMat value(double s) const;
    /// Right derivative on the segment containing s (constant per segment).
    SymMat derivative(double s) const;
    SymMat endpoint() const { return values_.back(); }

private:
    std::vector<double> times_;
    std::vector<SymMat> values_;
};

/// Left-continuous step path pi: [0,1] -> S^D_+, value v_j on
/// (s_j, s_{j+1}] with pi(0) = v_0. Used for composed order parameters.
struct StepPath {
    std::vector<double> breaks;   // strictly increasing, in (0, 1)
    std::vector<SymMat> values;   // size breaks.size() + 1

    SymMat value(double s) const;
    SymMat endpoint() const { return values.back(); }
};

/// pi = psi o alpha^{-1}: the step path with values psi(q_l) on the level
/// intervals of alpha. Endpoint pi(1) = psi(1).
StepPath compose_pi(const MatrixPath& psi, const DiscreteCdf& alpha);

/// Inverse factorization of a step path into a piecewise-linear path and a
/// step CDF with compose_pi(psi, alpha) == pi.
std::pair<MatrixPath, DiscreteCdf> decompose_pi(const StepPath& pi);

/// mu(s) = grad_xi(psi(s)) and its derivative gamma, exact within the
/// Hadamard mixture family. Holds copies of the model and path.
class DerivedPath {
public:
    DerivedPath(MixtureModel model, MatrixPath psi);

    int dim() const { return psi_.dim(); }
    const MixtureModel& model() const { return model_; }
    const MatrixPath& psi() const { return psi_; }

    SymMat mu(double s) const;
    /// Exact covariance increment mu(t) - mu(s).
    SymMat mu_increment(double s, double t) const;
    SymMat gamma(double s) const;

    /// Measured Lipschitz constant of mu: max Frobenius norm of gamma over
    /// an s-mesh refined against the knots.
    double lipschitz_mu(int mesh = 256) const;

private:
    MixtureModel model_;
    MatrixPath psi_;
};

} // namespace parisi
