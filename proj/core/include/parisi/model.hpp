#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "parisi/symmat.hpp"

namespace parisi {

enum class ModelKind { PottsHadamard, ScalarMixed };

/// Covariance function xi restricted to the entrywise (Hadamard) mixture
/// family xi(a) = sum_{k,k'} sum_p beta_p^2 a_{kk'}^p. At D = 1 this is
/// the scalar mixed p-spin xi(r) = sum_p beta_p^2 r^p. Gradients and the
/// conjugate theta are exact in this family.
class MixtureModel {
public:
    MixtureModel(int dim, std::vector<std::pair<int, double>> betas,
                 ModelKind kind = ModelKind::PottsHadamard);

    int dim() const { return dim_; }
    ModelKind kind() const { return kind_; }
    const std::vector<std::pair<int, double>>& betas() const { return betas_; }
    int max_power() const { return max_power_; }

    double xi(const SymMat& a) const;
    SymMat grad_xi(const SymMat& a) const;
    /// theta(a) = a . grad_xi(a) - xi(a).
    double theta(const SymMat& a) const;

    /// Second-derivative contraction d/ds grad_xi(psi(s)) along a segment
    /// direction: sum_p p(p-1) beta_p^2 a^{o(p-2)} o adot.
    SymMat gamma_along(const SymMat& a, const SymMat& adot) const;

private:
    int dim_;
    std::vector<std::pair<int, double>> betas_;
    ModelKind kind_;
    int max_power_ = 2;
};

struct AssumptionWitness {
    std::string which;
    double margin = 0.0;
};

/// Randomized falsification report for the monotonicity assumption on
/// grad_xi over ordered PSD pairs and for the strict second-order
/// monotonicity condition over (a, b, c) triples. A pass is evidence
/// gathered over `samples` draws, not a proof.
struct AssumptionReport {
    bool monotone_ok = true;          // xi and grad_xi increasing along the Loewner order
    bool second_order_ok = true;      // c . d/dt grad(b . grad_xi)(a + t c) > 0
    int samples = 0;
    double min_monotone_margin = 0.0;
    double min_second_order_margin = 0.0;
    std::optional<AssumptionWitness> failure;
};

AssumptionReport check_assumptions(const MixtureModel& model, int samples, std::uint64_t seed);

} // namespace parisi
