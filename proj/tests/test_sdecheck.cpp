#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "parisi/errors.hpp"
#include "parisi/sdecheck.hpp"
#include "test_util.hpp"

using namespace parisi;

namespace {

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

} // namespace

TEST_CASE("flat path: frozen state and constant control") {
    const MixtureModel model(1, {{2, 0.8}}, ModelKind::ScalarMixed);
    SymMat z(1);
    z.at(0, 0) = 0.5;
    const DerivedPath derived(model, MatrixPath::constant(z));
    const BaseMeasure base = BaseMeasure::ising();
    const GridSpec spec = GridSpec::make(1, 5.0, 0.02);
    const PdeSolution sol = solve_pde(base, derived, DiscreteCdf::one_step(0.4, 0.7), spec);

    ControlProblem cp;
    cp.solution = &sol;
    cp.s = 0.1;
    cp.t = 0.9;
    cp.x = {0.6};
    cp.n_paths = 64;
    cp.n_steps = 16;
    const SdeSimulation sim = simulate_optimal(cp);

    double want_u;
    sol.level(0).gradient(cp.x, std::span<double>(&want_u, 1));
    for (int p = 0; p < sim.n_paths; ++p) {
        CHECK(sim.endpoint[p] == doctest::Approx(0.6));
        for (int k = 0; k < sim.n_steps; ++k)
            CHECK(sim.control[std::size_t(p) * sim.n_steps + k] == doctest::Approx(want_u));
    }
}

TEST_CASE("driftless window is a time-changed brownian motion") {
    // below the first jump the level is 0, so the state is pure noise with
    // variance mu(t) - mu(s)
    const ScalarSetup s(0.7);
    const DiscreteCdf alpha({0.0, 0.8, 1.0}, {0.0, 0.9, 1.0});
    const PdeSolution sol = solve_pde(s.base, s.derived, alpha, s.spec);

    ControlProblem cp;
    cp.solution = &sol;
    cp.s = 0.1;
    cp.t = 0.7;
    cp.x = {0.0};
    cp.n_paths = 4096;
    cp.n_steps = 64;
    cp.seed = 5;
    const SdeSimulation sim = simulate_optimal(cp);

    double mean = 0.0, second = 0.0;
    for (int p = 0; p < sim.n_paths; ++p) {
        mean += sim.endpoint[p];
        second += sim.endpoint[p] * sim.endpoint[p];
    }
    mean /= sim.n_paths;
    second /= sim.n_paths;
    const double want_var = sol.derived().mu_increment(cp.s, cp.t)(0, 0);
    CHECK(std::abs(mean) <= 4.0 * std::sqrt(want_var / sim.n_paths));
    CHECK(second - mean * mean ==
          doctest::Approx(want_var).epsilon(4.0 * std::sqrt(2.0 / sim.n_paths)));
}

TEST_CASE("control value recovers the solution and dominates perturbations") {
    const ScalarSetup s(0.8);
    const DiscreteCdf alpha({0.0, 0.3, 1.0}, {0.3, 0.8, 1.0});
    const PdeSolution sol = solve_pde(s.base, s.derived, alpha, s.spec);

    ControlProblem cp;
    cp.solution = &sol;
    cp.s = 0.05;
    cp.t = 0.95;
    cp.x = {0.3};
    cp.n_paths = 4096;
    cp.n_steps = 128;
    cp.seed = 8;
    const SdeSimulation sim = simulate_optimal(cp);
    const ControlValue star = control_value(cp, sim, {ControlSpec::Kind::Optimal, {}, 1.0});
    CHECK(std::abs(star.mean - sol.value(cp.s, cp.x)) <= 3.0 * star.stderr_ + 5e-3);

    for (double c : {0.4, -0.3, 0.15}) {
        const ControlValue pert = control_value(cp, sim, {ControlSpec::Kind::Shifted, {c}, 1.0});
        CHECK(pert.mean <= star.mean + 3.0 * (pert.stderr_ + star.stderr_));
    }
    // the null control drops the drift entirely and is suboptimal
    const ControlValue null_u = control_value(cp, sim, {ControlSpec::Kind::Scaled, {}, 0.0});
    CHECK(null_u.mean <= star.mean + 3.0 * (null_u.stderr_ + star.stderr_));
}

TEST_CASE("martingale structure along the optimal path") {
    const ScalarSetup s(0.8);
    const DiscreteCdf alpha({0.0, 0.4, 1.0}, {0.2, 0.7, 1.0});
    const PdeSolution sol = solve_pde(s.base, s.derived, alpha, s.spec);

    ControlProblem cp;
    cp.solution = &sol;
    cp.s = 0.1;
    cp.t = 0.9;
    cp.x = {0.2};
    cp.n_paths = 8192;
    cp.n_steps = 128;
    cp.seed = 9;
    const SdeSimulation sim = simulate_optimal(cp);

    const MartingaleReport grad = gradient_martingale_check(sim);
    CHECK(std::abs(grad.mean_gap[0]) <= 3.5 * grad.stderr_[0] + 1e-3);

    const MartingaleReport hess = hessian_evolution_check(sim);
    CHECK(std::abs(hess.mean_gap[0]) <= 3.5 * hess.stderr_[0] + 3e-3);
}

TEST_CASE("uniqueness window condition") {
    const ScalarSetup s(0.8, 0.05);
    const DiscreteCdf alpha({0.0, 0.3, 1.0}, {0.3, 0.8, 1.0});
    const PdeSolution sol = solve_pde(s.base, s.derived, alpha, s.spec);
    const double c_bound = std::sqrt(1.0) * max_hessian_norm(sol.level(0), 4);

    ControlProblem cp;
    cp.solution = &sol;
    cp.x = {0.0};

    // a short window passes
    cp.s = 0.4;
    cp.t = 0.45;
    CHECK(uniqueness_window_check(cp, c_bound).window_ok);
    CHECK(uniqueness_window_check(cp, c_bound).alpha_positive);

    // a window where the cdf vanishes is vacuous: integral 0 but flagged
    const DiscreteCdf zero_low({0.0, 0.9, 1.0}, {0.0, 0.9, 1.0});
    const PdeSolution sol2 = solve_pde(s.base, s.derived, zero_low, s.spec);
    cp.solution = &sol2;
    cp.s = 0.1;
    cp.t = 0.5;
    const WindowReport vac = uniqueness_window_check(cp, c_bound);
    CHECK(vac.integral == doctest::Approx(0.0));
    CHECK(vac.window_ok);
    CHECK_FALSE(vac.alpha_positive);

    // at low temperature the full window fails the smallness condition
    const ScalarSetup cold(1.5, 0.05);
    const PdeSolution sol3 = solve_pde(cold.base, cold.derived, alpha, cold.spec);
    const double c3 = max_hessian_norm(sol3.level(0), 4);
    cp.solution = &sol3;
    cp.s = 0.0;
    cp.t = 1.0;
    CHECK_FALSE(uniqueness_window_check(cp, c3).window_ok);
}

TEST_CASE("problem validation") {
    const ScalarSetup s(0.5, 0.1);
    const PdeSolution sol = solve_pde(s.base, s.derived, DiscreteCdf::trivial(), s.spec);
    ControlProblem cp;
    cp.solution = &sol;
    cp.x = {0.0};
    cp.s = 0.5;
    cp.t = 0.3;
    CHECK_THROWS_AS(simulate_optimal(cp), ValidationError);
    cp.t = 0.9;
    cp.n_steps = 4;
    CHECK_THROWS_AS(simulate_optimal(cp), ValidationError);
    cp.n_steps = 16;
    cp.x = {0.0, 0.0};
    CHECK_THROWS_AS(simulate_optimal(cp), ValidationError);
}
