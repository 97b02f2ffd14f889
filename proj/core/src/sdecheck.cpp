#include "parisi/sdecheck.hpp"

#include <algorithm>
#include <cmath>

#include "parisi/errors.hpp"
#include "parisi/parallel.hpp"
#include "parisi/quadrature.hpp"
#include "parisi/rng.hpp"

namespace parisi {

namespace {

void validate(const ControlProblem& cp) {
    if (!cp.solution) throw ValidationError("ControlProblem: missing solution");
    if (!(0.0 <= cp.s && cp.s < cp.t && cp.t <= 1.0))
        throw ValidationError("ControlProblem: window must satisfy 0 <= s < t <= 1");
    if (cp.n_steps < 8) throw ValidationError("ControlProblem: n_steps must be >= 8");
    if (cp.n_paths < 2) throw ValidationError("ControlProblem: n_paths must be >= 2");
    if (static_cast<int>(cp.x.size()) != cp.solution->spec().dim)
        throw ValidationError("ControlProblem: start point dimension mismatch");
}

SymMat sandwich(const SymMat& h, const SymMat& g) {
    const int n = h.dim();
    SymMat out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) acc += h(i, k) * g(k, l) * h(l, j);
            out.at(i, j) = acc;
        }
    return out;
}

MartingaleReport summarize(const std::vector<std::vector<double>>& samples, int dim) {
    MartingaleReport rep;
    rep.mean_gap.assign(dim, 0.0);
    rep.stderr_.assign(dim, 0.0);
    const double n = static_cast<double>(samples.size());
    for (const auto& s : samples)
        for (int d = 0; d < dim; ++d) rep.mean_gap[d] += s[d] / n;
    for (const auto& s : samples)
        for (int d = 0; d < dim; ++d) {
            const double c = s[d] - rep.mean_gap[d];
            rep.stderr_[d] += c * c;
        }
    for (int d = 0; d < dim; ++d) {
        rep.stderr_[d] = std::sqrt(rep.stderr_[d] / (n - 1.0) / n);
        if (rep.stderr_[d] > 0.0)
            rep.max_sigmas = std::max(rep.max_sigmas, std::abs(rep.mean_gap[d]) / rep.stderr_[d]);
    }
    return rep;
}

} // namespace

SdeSimulation simulate_optimal(const ControlProblem& cp) {
    validate(cp);
    const PdeSolution& sol = *cp.solution;
    const GridSpec& spec = sol.spec();
    const int dim = spec.dim;
    const int P = cp.n_paths;
    const int N = cp.n_steps;
    const double dt = (cp.t - cp.s) / N;
    const double sqrt_dt = std::sqrt(dt);
    const double exit_margin = spec.half_width - 2.0 * spec.spacing;

    SdeSimulation sim;
    sim.dim = dim;
    sim.n_paths = P;
    sim.n_steps = N;
    sim.s = cp.s;
    sim.t = cp.t;
    sim.start = cp.x;
    sim.endpoint.assign(std::size_t(P) * dim, 0.0);
    sim.drift_integral.assign(std::size_t(P) * dim, 0.0);
    sim.noise_integral.assign(std::size_t(P) * dim, 0.0);
    sim.quad_cost.assign(P, 0.0);
    sim.control.assign(std::size_t(P) * N * dim, 0.0);
    sim.grad_terminal.assign(std::size_t(P) * dim, 0.0);
    sim.hess_terminal.assign(P, SymMat(dim));
    sim.hess_drift.assign(P, SymMat(dim));
    sim.alpha_gamma_integral = SymMat(dim);

    std::vector<double> state(std::size_t(P) * dim);
    for (int p = 0; p < P; ++p)
        for (int d = 0; d < dim; ++d) state[std::size_t(p) * dim + d] = cp.x[d];
    std::vector<Rng> streams;
    streams.reserve(P);
    for (int p = 0; p < P; ++p) streams.emplace_back(derive_stream(cp.seed, p));
    std::vector<char> exited(P, 0);

    for (int k = 0; k < N; ++k) {
        const double r = cp.s + k * dt;
        const GridFn level = sol.at_time(r);
        const SymMat gamma = sol.derived().gamma(r);
        const double a = sol.alpha().evaluate(r);
        const SymMat root = sqrt_psd(gamma, 1e-9);
        sim.alpha_gamma_integral += (a * dt) * gamma;
        sim.alpha_tr_gamma_integral += a * gamma.trace() * dt;

        parallel_for(static_cast<std::size_t>(P), [&](std::size_t p) {
            double* xp = state.data() + p * dim;
            const std::span<const double> xs(xp, dim);
            double g[SymMat::kMaxDim];
            level.gradient(xs, std::span<double>(g, dim));
            double* up = sim.control.data() + (p * N + k) * dim;
            for (int d = 0; d < dim; ++d) up[d] = g[d];

            sim.quad_cost[p] += a * gamma.quad_form(std::span<const double>(g, dim)) * dt;

            const SymMat hess = level.hessian(xs);
            sim.hess_drift[p] += (a * dt) * sandwich(hess, gamma);

            double drift[SymMat::kMaxDim];
            gamma.apply(std::span<const double>(g, dim), std::span<double>(drift, dim));

            double z[SymMat::kMaxDim];
            double dw[SymMat::kMaxDim];
            for (int d = 0; d < dim; ++d) z[d] = streams[p].normal();
            root.apply(std::span<const double>(z, dim), std::span<double>(dw, dim));

            for (int d = 0; d < dim; ++d) {
                const double dd = a * drift[d] * dt;
                const double nn = dw[d] * sqrt_dt;
                sim.drift_integral[p * dim + d] += dd;
                sim.noise_integral[p * dim + d] += nn;
                xp[d] += dd + nn;
                if (std::abs(xp[d]) > exit_margin) exited[p] = 1;
            }
        });
    }

    const GridFn level_t = sol.at_time(cp.t);
    const GridFn level_s = sol.at_time(cp.s);
    parallel_for(static_cast<std::size_t>(P), [&](std::size_t p) {
        double* xp = state.data() + p * dim;
        const std::span<const double> xs(xp, dim);
        for (int d = 0; d < dim; ++d) sim.endpoint[p * dim + d] = xp[d];
        level_t.gradient(xs, std::span<double>(sim.grad_terminal.data() + p * dim, dim));
        sim.hess_terminal[p] = level_t.hessian(xs);
    });
    sim.grad_start.assign(dim, 0.0);
    level_s.gradient(cp.x, sim.grad_start);
    sim.hess_start = level_s.hessian(cp.x);
    for (char e : exited) sim.exited_paths += e;
    return sim;
}

ControlValue control_value(const ControlProblem& cp, const SdeSimulation& sim,
                           const ControlSpec& control) {
    validate(cp);
    const int dim = sim.dim;
    if (control.kind == ControlSpec::Kind::Shifted &&
        static_cast<int>(control.shift.size()) != dim)
        throw ValidationError("control_value: shift dimension mismatch");

    const GridFn level_t = cp.solution->at_time(cp.t);

    double shift_move[SymMat::kMaxDim] = {};
    double shift_quad = 0.0;
    if (control.kind == ControlSpec::Kind::Shifted) {
        sim.alpha_gamma_integral.apply(control.shift,
                                       std::span<double>(shift_move, dim));
        shift_quad = sim.alpha_gamma_integral.quad_form(control.shift);
    }

    std::vector<double> values(sim.n_paths);
    parallel_for(static_cast<std::size_t>(sim.n_paths), [&](std::size_t p) {
        double endpoint[SymMat::kMaxDim];
        double cost = 0.0;
        const double* drift = sim.drift_integral.data() + p * dim;
        const double* noise = sim.noise_integral.data() + p * dim;
        switch (control.kind) {
            case ControlSpec::Kind::Optimal:
                for (int d = 0; d < dim; ++d) endpoint[d] = sim.start[d] + drift[d] + noise[d];
                cost = sim.quad_cost[p];
                break;
            case ControlSpec::Kind::Shifted: {
                for (int d = 0; d < dim; ++d)
                    endpoint[d] = sim.start[d] + drift[d] + shift_move[d] + noise[d];
                double cross = 0.0;
                for (int d = 0; d < dim; ++d) cross += control.shift[d] * drift[d];
                cost = sim.quad_cost[p] + 2.0 * cross + shift_quad;
                break;
            }
            case ControlSpec::Kind::Scaled:
                for (int d = 0; d < dim; ++d)
                    endpoint[d] = sim.start[d] + control.factor * drift[d] + noise[d];
                cost = control.factor * control.factor * sim.quad_cost[p];
                break;
        }
        values[p] =
            level_t.interpolate(std::span<const double>(endpoint, dim)) - 0.5 * cost;
    });

    ControlValue out;
    for (double v : values) out.mean += v;
    out.mean /= sim.n_paths;
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stderr_ = std::sqrt(ss / (sim.n_paths - 1.0) / sim.n_paths);
    return out;
}

WindowReport uniqueness_window_check(const ControlProblem& cp, double spectral_bound) {
    validate(cp);
    if (spectral_bound <= 0.0)
        throw ValidationError("uniqueness_window_check: bound must be positive");
    const PdeSolution& sol = *cp.solution;

    std::vector<double> cuts{cp.s, cp.t};
    for (double q : sol.alpha().qs())
        if (q > cp.s && q < cp.t) cuts.push_back(q);
    for (double q : sol.derived().psi().knot_times())
        if (q > cp.s && q < cp.t) cuts.push_back(q);
    std::sort(cuts.begin(), cuts.end());

    WindowReport rep;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b - a < 1e-15) continue;
        const double lvl = sol.alpha().evaluate(0.5 * (a + b));
        rep.integral += lvl * integrate_gl(
                                  [&](double r) { return sol.derived().gamma(r).trace(); }, a, b,
                                  8);
    }
    rep.bound = 1.0 / spectral_bound;
    rep.window_ok = rep.integral < rep.bound;
    rep.alpha_positive = sol.alpha().evaluate(cp.s) > 0.0;
    return rep;
}

MartingaleReport gradient_martingale_check(const SdeSimulation& sim) {
    std::vector<std::vector<double>> gaps(sim.n_paths, std::vector<double>(sim.dim));
    for (int p = 0; p < sim.n_paths; ++p)
        for (int d = 0; d < sim.dim; ++d)
            gaps[p][d] = sim.grad_terminal[std::size_t(p) * sim.dim + d] - sim.grad_start[d];
    return summarize(gaps, sim.dim);
}

MartingaleReport hessian_evolution_check(const SdeSimulation& sim) {
    const int dim = sim.dim;
    const int comps = dim * (dim + 1) / 2;
    std::vector<std::vector<double>> gaps(sim.n_paths, std::vector<double>(comps));
    for (int p = 0; p < sim.n_paths; ++p) {
        int c = 0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j <= i; ++j) {
                gaps[p][c++] = sim.hess_terminal[p](i, j) - sim.hess_start(i, j) +
                               sim.hess_drift[p](i, j);
            }
    }
    return summarize(gaps, comps);
}

} // namespace parisi
