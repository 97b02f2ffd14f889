#pragma once

#include <span>
#include <vector>

#include "parisi/symmat.hpp"

namespace parisi {

/// Finite atomic measure on the closed unit ball of R^D. Weights are
/// positive but need not sum to one (tilted measures are finite, not
/// probability). log_mgf is the log of the exponential integral
/// x -> log sum_a w_a exp(x . sigma_a), evaluated stably.
class BaseMeasure {
public:
    struct Atom {
        std::vector<double> point;
        double weight;
    };

    BaseMeasure(int dim, std::vector<Atom> atoms);

    static BaseMeasure ising();               // uniform on {-1, +1}, D = 1
    static BaseMeasure potts_uniform(int dim);// uniform on the standard basis

    int dim() const { return dim_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    double max_norm() const { return max_norm_; }
    bool is_dirac() const;

    double log_mgf(std::span<const double> x) const;
    /// Exact gradient of log_mgf: the mean of sigma under the Gibbs
    /// weights w_a exp(x . sigma_a).
    void log_mgf_gradient(std::span<const double> x, std::span<double> g) const;
    /// Exact Hessian of log_mgf: the Gibbs covariance of sigma.
    SymMat log_mgf_hessian(std::span<const double> x) const;

    /// Reweighted measure with each atom scaled by exp(-0.5 tilt . s s^T).
    BaseMeasure tilted(const SymMat& tilt) const;

private:
    int dim_;
    std::vector<Atom> atoms_;
    double max_norm_ = 0.0;
};

} // namespace parisi
