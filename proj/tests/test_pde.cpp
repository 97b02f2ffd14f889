#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "parisi/errors.hpp"
#include "parisi/pde.hpp"
#include "test_util.hpp"

using namespace parisi;

namespace {

// the scalar setup used throughout: unit spins, quadratic interaction,
// linear path to z = 1
struct ScalarSetup {
    MixtureModel model;
    MatrixPath psi;
    DerivedPath derived;
    BaseMeasure base;
    GridSpec spec;

    explicit ScalarSetup(double beta, double spacing = 0.02)
        : model(1, {{2, beta}}, ModelKind::ScalarMixed),
          psi(MatrixPath::linear(SymMat::identity(1))),
          derived(model, psi),
          base(BaseMeasure::ising()),
          spec(GridSpec::make(1, default_half_width(base, derived), spacing)) {}
};

double at(const GridFn& f, double x) { return f.interpolate(std::span<const double>(&x, 1)); }

} // namespace

TEST_CASE("terminal condition") {
    const BaseMeasure potts = BaseMeasure::potts_uniform(2);
    const GridSpec spec = GridSpec::make(2, 4.0, 0.1);
    const GridFn phi = terminal_condition(potts, spec);
    const double zero[2] = {0.0, 0.0};
    CHECK(phi.interpolate(zero) == doctest::Approx(0.0));
    const double x[2] = {1.2, 0.0};
    CHECK(phi.interpolate(x) == doctest::Approx(std::log((std::exp(1.2) + 1.0) / 2.0)));

    const ScalarSetup s(0.8);
    const GridFn psi1 = terminal_condition(s.base, s.spec);
    for (double t : {-2.0, 0.0, 0.9}) CHECK(at(psi1, t) == doctest::Approx(testutil::log_cosh(t)));
}

TEST_CASE("propagation with zero covariance is the identity") {
    const ScalarSetup s(0.5, 0.05);
    const GridFn phi = terminal_condition(s.base, s.spec);
    const GridFn out = propagate_level(phi, SymMat(1), 0.7);
    CHECK(sup_difference(out, phi) == 0.0);
}

TEST_CASE("propagation reproduces the gaussian cosh identity") {
    // E cosh(x + c g) = cosh(x) exp(c^2/2), so the m = 1 step adds c^2/2
    const ScalarSetup s(0.5);
    const GridFn phi = terminal_condition(s.base, s.spec);
    SymMat cov(1);
    cov.at(0, 0) = 0.8 * 0.8;
    const GridFn out = propagate_level(phi, cov, 1.0);
    for (double x : {-2.5, -0.3, 0.0, 1.0, 3.0})
        CHECK(std::abs(at(out, x) - (testutil::log_cosh(x) + 0.32)) <= 1e-4);
}

TEST_CASE("plain expectation branch on a quadratic") {
    // E (x + sqrt(v) g)^2 = x^2 + v near the center of the box
    const GridSpec spec = GridSpec::make(1, 8.0, 0.02);
    GridFn quad(spec);
    for (std::size_t i = 0; i < spec.total; ++i) {
        double x;
        spec.point(i, std::span<double>(&x, 1));
        quad[i] = x * x;
    }
    SymMat cov(1);
    cov.at(0, 0) = 0.36;
    const GridFn out = propagate_level(quad, cov, 0.0);
    for (double x : {-1.0, 0.0, 0.5, 2.0})
        CHECK(std::abs(at(out, x) - (x * x + 0.36)) <= 2e-4);
}

TEST_CASE("exponent validation") {
    const ScalarSetup s(0.5, 0.1);
    const GridFn phi = terminal_condition(s.base, s.spec);
    CHECK_THROWS_AS(propagate_level(phi, SymMat(1), -0.1), ValidationError);
    CHECK_THROWS_AS(propagate_level(phi, SymMat(1), 1.2), ValidationError);
}

TEST_CASE("scalar one-jump solution in closed form") {
    // tilted unit-spin base: Phi(q, y) = log cosh y + b^2 (1 - q) - b^2 and
    // Phi(0, x) = E log cosh(x + b sqrt(2q) g) + b^2 (1 - q) - b^2
    const double beta = 0.8, q = 0.4;
    const ScalarSetup s(beta, 0.01);
    const BaseMeasure tilted = s.base.tilted(s.derived.mu(1.0));
    const PdeSolution sol = solve_pde(tilted, s.derived, DiscreteCdf::one_step(q, 1.0), s.spec);

    const GridFn at_q = sol.at_time(q);
    for (double y : {-1.5, 0.0, 0.8})
        CHECK(std::abs(at(at_q, y) -
                       (testutil::log_cosh(y) + beta * beta * (1.0 - q) - beta * beta)) <= 1e-4);

    for (double x : {-1.0, 0.0, 0.6}) {
        const double want = gauss_expectation(
                                [&](double g) {
                                    return testutil::log_cosh(x + beta * std::sqrt(2.0 * q) * g);
                                },
                                64) +
                            beta * beta * (1.0 - q) - beta * beta;
        CHECK(std::abs(at(sol.level(0), x) - want) <= 1e-4);
    }
}

TEST_CASE("single trivial level averages the terminal condition") {
    const double beta = 0.6;
    const ScalarSetup s(beta, 0.01);
    const PdeSolution sol = solve_pde(s.base, s.derived, DiscreteCdf::trivial(), s.spec);
    for (double x : {-0.8, 0.0, 1.2}) {
        const double want = gauss_expectation(
            [&](double g) { return testutil::log_cosh(x + beta * std::sqrt(2.0) * g); }, 64);
        CHECK(std::abs(at(sol.level(0), x) - want) <= 1e-4);
    }
}

TEST_CASE("flat path freezes the solution") {
    const MixtureModel model(2, {{2, 1.0}});
    const MatrixPath flat = MatrixPath::constant(MatrixPath::potts_star(2).endpoint());
    const DerivedPath derived(model, flat);
    const BaseMeasure base = BaseMeasure::potts_uniform(2);
    const GridSpec spec = GridSpec::make(2, 5.0, 0.1);
    const PdeSolution sol =
        solve_pde(base, derived, DiscreteCdf({0.0, 0.3, 1.0}, {0.2, 0.8, 1.0}), spec);
    const GridFn phi = terminal_condition(base, spec);
    for (int l = 0; l < static_cast<int>(sol.level_times().size()); ++l)
        CHECK(sup_difference(sol.level(l), phi) == 0.0);
    CHECK(sup_difference(sol.at_time(0.55), phi) == 0.0);
}

TEST_CASE("covariance increments that fail to be psd are rejected") {
    // a path increasing out of the psd cone makes mu decrease for p = 3
    const MixtureModel model(1, {{3, 1.0}}, ModelKind::ScalarMixed);
    SymMat lo(1), hi(1);
    lo.at(0, 0) = -1.0;
    const MatrixPath psi({0.0, 1.0}, {lo, hi});
    const DerivedPath derived(model, psi);
    const GridSpec spec = GridSpec::make(1, 4.0, 0.1);
    CHECK_THROWS_AS(solve_pde(BaseMeasure::ising(), derived, DiscreteCdf::trivial(), spec),
                    NumericError);
}

TEST_CASE("gradient of the terminal level is tanh") {
    const ScalarSetup s(0.5);
    const PdeSolution sol = solve_pde(s.base, s.derived, DiscreteCdf::one_step(0.5, 1.0), s.spec);
    const int top = static_cast<int>(sol.level_times().size()) - 1;
    for (double x : {-1.2, 0.0, 0.7}) {
        double g;
        sol.level(top).gradient(std::span<const double>(&x, 1), std::span<double>(&g, 1));
        CHECK(g == doctest::Approx(std::tanh(x)).epsilon(1e-4));
    }
}

TEST_CASE("solution symmetry and curvature bounds on the simplex model") {
    const MixtureModel model(2, {{2, 1.0}});
    const MatrixPath psi = MatrixPath::potts_star(2);
    const DerivedPath derived(model, psi);
    const BaseMeasure base = BaseMeasure::potts_uniform(2);
    const GridSpec spec = GridSpec::make(2, default_half_width(base, derived), 0.1);
    const PdeSolution sol = solve_pde(base, derived, DiscreteCdf::one_step(0.5, 0.6), spec);

    // exchange symmetry on the diagonal
    for (double t : {-1.0, 0.2, 1.4}) {
        const double x[2] = {t, t};
        double g[2];
        sol.level(0).gradient(x, g);
        CHECK(std::abs(g[0] - g[1]) <= 1e-9);
    }

    // gradient bound and convexity scanned over the central half-box
    // (the band near the boundary is extrapolation-dominated)
    const double tol_hess = 1e-6 + spec.spacing * spec.spacing;
    const int c = spec.origin_index(), reach = c / 2;
    for (int i = c - reach; i <= c + reach; i += 7)
        for (int j = c - reach; j <= c + reach; j += 7) {
            const double x[2] = {spec.coord(i), spec.coord(j)};
            double g[2];
            sol.level(0).gradient(x, g);
            CHECK(std::sqrt(g[0] * g[0] + g[1] * g[1]) <=
                  1.0 + 1e-6 + 4 * spec.spacing * spec.spacing);
            CHECK(min_eigenvalue(sol.level(0).hessian(x)) >= -tol_hess);
        }
}

TEST_CASE("residual vanishes identically when the path is flat") {
    const MixtureModel model(1, {{2, 1.0}}, ModelKind::ScalarMixed);
    const MatrixPath flat = MatrixPath::constant(SymMat(1));
    const DerivedPath derived(model, flat);
    const GridSpec spec = GridSpec::make(1, 4.0, 0.05);
    const PdeSolution sol = solve_pde(BaseMeasure::ising(), derived,
                                      DiscreteCdf({0.0, 0.5, 1.0}, {0.3, 0.7, 1.0}), spec);
    const ResidualReport rep = pde_residual(sol, std::nullopt, 40, 17);
    CHECK(rep.max_abs == 0.0);
}

TEST_CASE("residual is small inside flat pieces of the step cdf") {
    const ScalarSetup s(0.6);
    const PdeSolution sol =
        solve_pde(s.base, s.derived, DiscreteCdf({0.0, 0.5, 1.0}, {0.25, 0.75, 1.0}), s.spec);
    const ResidualReport rep = pde_residual(sol, std::nullopt, 60, 18);
    CHECK(rep.points > 0);
    CHECK(rep.max_abs < 2e-3);
}

TEST_CASE("staircase passthrough for step inputs") {
    const ScalarSetup s(0.7, 0.05);
    const int n = 8;
    std::vector<double> qs(n + 1), ms(n + 1);
    for (int l = 0; l <= n; ++l) {
        qs[l] = double(l) / n;
        ms[l] = std::min(1.0, 0.1 + double(l) / n);
    }
    ms[n] = 1.0;
    const DiscreteCdf stair(qs, ms);
    const PdeSolution direct = solve_pde(s.base, s.derived, stair, s.spec);
    const GeneralSolve general = solve_pde_general(
        s.base, s.derived, [&](double r) { return stair.evaluate(r); }, n, s.spec);
    CHECK(general.approx_distance <= 1e-12);
    CHECK(sup_difference(general.solution.level(0), direct.level(0)) == 0.0);
}

TEST_CASE("staircase refinement is cauchy at first order") {
    const ScalarSetup s(0.8, 0.02);
    auto uniform = [](double r) { return r; };
    const double v8 =
        at(solve_pde_general(s.base, s.derived, uniform, 8, s.spec).solution.level(0), 0.0);
    const double v16 =
        at(solve_pde_general(s.base, s.derived, uniform, 16, s.spec).solution.level(0), 0.0);
    const double v32 =
        at(solve_pde_general(s.base, s.derived, uniform, 32, s.spec).solution.level(0), 0.0);
    const double gap1 = std::abs(v8 - v16);
    const double gap2 = std::abs(v16 - v32);
    CHECK(gap2 <= gap1 / 1.5);
}

TEST_CASE("approximating sequences agree within the lipschitz budget") {
    const ScalarSetup s(0.8, 0.02);
    const int n = 16;
    // left- and right-endpoint staircases straddle the uniform cdf
    std::vector<double> qs(n + 1), lo(n + 1), hi(n + 1);
    for (int l = 0; l <= n; ++l) {
        qs[l] = double(l) / n;
        lo[l] = double(l) / n;
        hi[l] = std::min(1.0, double(l + 1) / n);
    }
    lo[n] = hi[n] = 1.0;
    const PdeSolution a = solve_pde(s.base, s.derived, DiscreteCdf(qs, lo), s.spec);
    const PdeSolution b = solve_pde(s.base, s.derived, DiscreteCdf(qs, hi), s.spec);
    const double c = s.derived.lipschitz_mu();
    CHECK(std::abs(at(a.level(0), 0.0) - at(b.level(0), 0.0)) <= 2.0 * c / n);
}

TEST_CASE("exponential bridge has unit mean") {
    const ScalarSetup s(0.7);
    const PdeSolution sol = solve_pde(
        s.base, s.derived, DiscreteCdf({0.0, 0.4, 0.8, 1.0}, {0.2, 0.5, 0.9, 1.0}), s.spec);
    for (double sv : {0.1, 0.55}) {
        const double x = 0.3;
        const ExpMartingaleStat stat =
            exp_martingale_stat(sol, sv, std::span<const double>(&x, 1), 20000, 77);
        CHECK(std::abs(stat.mean - 1.0) <= 3.5 * stat.stderr_);
    }
}

TEST_CASE("interior time evaluation matches an independent re-derivation") {
    // inside [q, 1) the solution is log cosh plus a deterministic shift
    const double beta = 0.8, q = 0.4;
    const ScalarSetup s(beta, 0.01);
    const BaseMeasure tilted = s.base.tilted(s.derived.mu(1.0));
    const PdeSolution sol = solve_pde(tilted, s.derived, DiscreteCdf::one_step(q, 1.0), s.spec);
    const GridFn mid = sol.at_time(0.7);
    for (double y : {-0.9, 0.0, 1.1})
        CHECK(std::abs(at(mid, y) -
                       (testutil::log_cosh(y) + beta * beta * (1.0 - 0.7) - beta * beta)) <= 1e-4);
}
