#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "parisi/errors.hpp"
#include "parisi/optimize.hpp"
#include "test_util.hpp"

using namespace parisi;

namespace {

// reference projection by explicit minimization over a fine lattice of
// pooled values; only used to validate the pool-adjacent-violators step
std::vector<double> brute_isotonic(const std::vector<double>& y) {
    const std::size_t n = y.size();
    std::vector<double> best;
    double best_cost = std::numeric_limits<double>::infinity();
    // enumerate all partitions into consecutive blocks (n <= 6 keeps this tiny)
    const int cuts = 1 << (n - 1);
    for (int mask = 0; mask < cuts; ++mask) {
        std::vector<double> x(n);
        std::size_t start = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool close = i + 1 == n || (mask >> i) & 1;
            if (!close) continue;
            double mean = 0.0;
            for (std::size_t j = start; j <= i; ++j) mean += y[j];
            mean /= double(i - start + 1);
            for (std::size_t j = start; j <= i; ++j) x[j] = mean;
            start = i + 1;
        }
        bool monotone = true;
        for (std::size_t i = 1; i < n; ++i) monotone = monotone && x[i] >= x[i - 1] - 1e-12;
        if (!monotone) continue;
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) cost += (x[i] - y[i]) * (x[i] - y[i]);
        if (cost < best_cost) {
            best_cost = cost;
            best = x;
        }
    }
    for (auto& v : best) v = std::clamp(v, 0.0, 1.0);
    return best;
}

struct ScalarSetup {
    MixtureModel model;
    MatrixPath psi;
    BaseMeasure base;
    GridSpec spec;

    explicit ScalarSetup(double beta, double spacing = 0.02)
        : model(1, {{2, beta}}, ModelKind::ScalarMixed),
          psi(MatrixPath::linear(SymMat::identity(1))),
          base(BaseMeasure::ising()),
          spec(GridSpec::make(1, default_half_width(base, DerivedPath(model, psi)), spacing)) {}
};

} // namespace

TEST_CASE("monotone projection") {
    // feasible points are fixed
    const std::vector<double> feas{0.1, 0.3, 0.3, 0.9};
    CHECK(project_monotone_box(feas) == feas);

    // matches the exhaustive block-partition optimum
    Rng rng(61);
    for (int it = 0; it < 200; ++it) {
        std::vector<double> y(5);
        for (auto& v : y) v = rng.uniform() * 1.6 - 0.3;
        const std::vector<double> pav = project_monotone_box(y);
        const std::vector<double> ref = brute_isotonic(y);
        for (std::size_t i = 0; i < y.size(); ++i)
            CHECK(pav[i] == doctest::Approx(ref[i]).epsilon(1e-10));
        for (std::size_t i = 1; i < y.size(); ++i) CHECK(pav[i] >= pav[i - 1] - 1e-14);
    }
}

TEST_CASE("high-temperature scalar model minimizes to the flat phase") {
    // 2 beta^2 < 1: the minimum sits at value zero
    ScalarSetup s(0.3);
    OptimizeConfig cfg;
    cfg.q_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    cfg.max_iters = 60;
    const MinimizeResult res = minimize_functional(s.model, s.psi, s.base, cfg, s.spec);
    CHECK(res.converged);
    CHECK(std::abs(res.value.total) <= 2e-4);
    // descent is monotone along the trace
    for (std::size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i].value <= res.trace[i - 1].value + 1e-12);
}

TEST_CASE("the one-jump line search agrees with a golden-section oracle") {
    // on the grid {0, q, 1} with a single free level pinned to 1, the
    // functional is the one-jump closed form; scan q through the level
    ScalarSetup s(0.8);
    // golden-section minimum of the closed form over q
    double lo = 1e-6, hi = 1.0;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    while (hi - lo > 1e-10) {
        if (testutil::rs_value(0.8, c) < testutil::rs_value(0.8, d)) {
            hi = d;
        } else {
            lo = c;
        }
        c = hi - gr * (hi - lo);
        d = lo + gr * (hi - lo);
    }
    const double q_star = 0.5 * (lo + hi);
    const double f_star = testutil::rs_value(0.8, q_star);

    const FunctionalValue f = evaluate_functional(
        s.model, s.psi, DiscreteCdf::one_step(q_star, 1.0), s.base, s.spec);
    CHECK(std::abs(f.total - f_star) <= 1e-4);

    // nearby jumps are no better: the solver value sits at the bottom
    for (double dq : {-0.05, 0.05}) {
        const FunctionalValue g = evaluate_functional(
            s.model, s.psi, DiscreteCdf::one_step(q_star + dq, 1.0), s.base, s.spec);
        CHECK(g.total >= f.total - 1e-5);
    }
}

TEST_CASE("random starts agree on the minimizer") {
    ScalarSetup s(0.8);
    OptimizeConfig cfg;
    cfg.q_grid = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
    cfg.max_iters = 120;
    cfg.tol_f = 1e-10;
    Rng rng(62);
    std::vector<std::vector<double>> minima;
    std::vector<double> values;
    for (int start = 0; start < 3; ++start) {
        std::vector<double> init(cfg.q_grid.size() - 1);
        for (auto& v : init) v = rng.uniform();
        std::sort(init.begin(), init.end());
        const MinimizeResult res =
            minimize_functional(s.model, s.psi, s.base, cfg, s.spec, {}, &init);
        std::vector<double> m(res.alpha.ms().begin(), res.alpha.ms().end() - 1);
        minima.push_back(std::move(m));
        values.push_back(res.value.total);
    }
    for (std::size_t i = 1; i < minima.size(); ++i) {
        for (std::size_t l = 0; l < minima[i].size(); ++l)
            CHECK(std::abs(minima[i][l] - minima[0][l]) <= 2e-3);
        CHECK(std::abs(values[i] - values[0]) <= 1e-6);
    }
}

TEST_CASE("refining the jump grid never raises the minimum") {
    ScalarSetup s(0.8);
    OptimizeConfig coarse;
    coarse.q_grid = {0.0, 0.5, 1.0};
    coarse.max_iters = 80;
    OptimizeConfig fine;
    fine.q_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    fine.max_iters = 80;
    const double v_coarse =
        minimize_functional(s.model, s.psi, s.base, coarse, s.spec).value.total;
    const double v_fine = minimize_functional(s.model, s.psi, s.base, fine, s.spec).value.total;
    CHECK(v_fine <= v_coarse + 1e-6);
}

TEST_CASE("flat path makes every cdf optimal") {
    const MixtureModel model(1, {{2, 0.8}}, ModelKind::ScalarMixed);
    SymMat z(1);
    z.at(0, 0) = 0.6;
    const MatrixPath flat = MatrixPath::constant(z);
    const BaseMeasure base = BaseMeasure::ising();
    const GridSpec spec = GridSpec::make(1, 6.0, 0.02);
    Rng rng(63);
    const FunctionalValue ref = evaluate_functional(
        model, flat, testutil::random_cdf(rng, {0.0, 0.5, 1.0}), base, spec);
    for (int it = 0; it < 5; ++it) {
        const FunctionalValue f = evaluate_functional(
            model, flat, testutil::random_cdf(rng, {0.0, 0.3, 0.7, 1.0}), base, spec);
        CHECK(f.total == doctest::Approx(ref.total).epsilon(1e-10));
    }
    // and the value reduces to the frozen-terminal average plus the
    // conjugate correction
    const BaseMeasure tilted = tilt(base, model, z);
    const double sig = std::sqrt(model.grad_xi(z)(0, 0));
    const double want_phi = gauss_expectation(
        [&](double g) {
            const double y = sig * g;
            return tilted.log_mgf(std::span<const double>(&y, 1));
        },
        64);
    CHECK(std::abs(ref.total - (want_phi + 0.5 * model.theta(z))) <= 1e-4);
}

TEST_CASE("convexity certificate") {
    ScalarSetup s(0.8);
    const ConvexityReport rep = certify_convexity(
        s.model, s.psi, s.base, {0.0, 0.25, 0.5, 0.75, 1.0}, 5, 64, s.spec);
    CHECK(rep.all_positive);
    CHECK(rep.min_slack > 1e-6);
}

TEST_CASE("bad q grids are rejected") {
    ScalarSetup s(0.5, 0.1);
    OptimizeConfig cfg;
    cfg.q_grid = {0.0, 0.7, 0.4, 1.0};
    CHECK_THROWS_AS(minimize_functional(s.model, s.psi, s.base, cfg, s.spec), ValidationError);
    cfg.q_grid = {0.1, 1.0};
    CHECK_THROWS_AS(minimize_functional(s.model, s.psi, s.base, cfg, s.spec), ValidationError);
}
