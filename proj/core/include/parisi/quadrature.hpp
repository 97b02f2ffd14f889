#pragma once

#include <vector>

namespace parisi {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Hermite rule for weight exp(-t^2) on (-inf, inf).
/// E f(Z) for standard normal Z is sum_i w_i f(sqrt(2) t_i) / sqrt(pi).
const QuadRule& gauss_hermite(int n);

/// The same rule pre-transformed for the standard normal measure:
/// nodes are sqrt(2) t_i and weights sum to 1.
const QuadRule& gauss_hermite_normal(int n);

/// Gauss-Legendre rule on [-1, 1].
const QuadRule& gauss_legendre(int n);

/// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
template <typename Fn>
double integrate_gl(Fn&& f, double a, double b, int n) {
    const QuadRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

/// E f(Z) for scalar standard normal Z with an n-point Hermite rule.
template <typename Fn>
double gauss_expectation(Fn&& f, int n) {
    const QuadRule& rule = gauss_hermite_normal(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(rule.nodes[i]);
    return acc;
}

} // namespace parisi
