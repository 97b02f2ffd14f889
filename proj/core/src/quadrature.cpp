#include "parisi/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "parisi/errors.hpp"

namespace parisi {

namespace {

// Hermite polynomial value and derivative (physicists' convention),
// evaluated with the weighted recurrence to avoid overflow. Returns the
// orthonormalized value h_n(t) and its derivative.
void hermite_eval(int n, double t, double& h, double& dh) {
    // orthonormal recurrence: h_{k+1} = t*sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1}
    double hm = 0.0;
    double h0 = std::pow(std::numbers::pi, -0.25);
    for (int k = 0; k < n; ++k) {
        double hp = t * std::sqrt(2.0 / (k + 1)) * h0 - std::sqrt(double(k) / (k + 1)) * hm;
        hm = h0;
        h0 = hp;
    }
    h = h0;
    dh = std::sqrt(2.0 * n) * hm;
}

QuadRule compute_hermite(int n) {
    if (n < 1) throw ValidationError("gauss_hermite: order must be >= 1");
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton from standard initial guesses, largest root first.
    const int half = (n + 1) / 2;
    double x = 0.0;
    for (int i = 0; i < half; ++i) {
        if (i == 0) {
            x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            x -= 1.14 * std::pow(double(n), 0.426) / x;
        } else if (i == 2) {
            x = 1.86 * x - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            x = 1.91 * x - 0.91 * rule.nodes[1];
        } else {
            x = 2.0 * x - rule.nodes[i - 2];
        }
        double h = 0.0, dh = 0.0;
        for (int it = 0; it < 100; ++it) {
            hermite_eval(n, x, h, dh);
            double dx = h / dh;
            x -= dx;
            if (std::abs(dx) < 1e-15 * (1.0 + std::abs(x))) break;
        }
        hermite_eval(n, x, h, dh);
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / (dh * dh);
    }
    // mirror to the negative half
    for (int i = 0; i < half; ++i) {
        rule.nodes[n - 1 - i] = -rule.nodes[i];
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    if (n % 2 == 1) rule.nodes[half - 1] = 0.0;
    // ascending order
    for (int i = 0; i < n / 2; ++i) {
        std::swap(rule.nodes[i], rule.nodes[n - 1 - i]);
        std::swap(rule.weights[i], rule.weights[n - 1 - i]);
    }
    return rule;
}

QuadRule compute_legendre(int n) {
    if (n < 1) throw ValidationError("gauss_legendre: order must be >= 1");
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p = 0.0, dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            p = p1;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

template <typename Make>
const QuadRule& cached(std::map<int, QuadRule>& cache, std::mutex& mu, int n, Make make) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make(n)).first;
    return it->second;
}

} // namespace

const QuadRule& gauss_hermite(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mu;
    return cached(cache, mu, n, compute_hermite);
}

const QuadRule& gauss_hermite_normal(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mu;
    return cached(cache, mu, n, [](int m) {
        QuadRule r = compute_hermite(m);
        const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
        for (int i = 0; i < m; ++i) {
            r.nodes[i] *= std::numbers::sqrt2;
            r.weights[i] *= inv_sqrt_pi;
        }
        return r;
    });
}

const QuadRule& gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mu;
    return cached(cache, mu, n, compute_legendre);
}

} // namespace parisi
