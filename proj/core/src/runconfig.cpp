#include "parisi/runconfig.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "parisi/errors.hpp"
#include "parisi/mcoracle.hpp"
#include "parisi/optimize.hpp"
#include "parisi/parallel.hpp"
#include "parisi/pde.hpp"
#include "parisi/potts.hpp"
#include "parisi/rng.hpp"
#include "parisi/sdecheck.hpp"
#include "parisi/verify.hpp"

namespace parisi {

namespace {

const ordered_json* find(const ordered_json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

std::vector<std::pair<int, double>> betas_from_json(const ordered_json& j) {
    std::vector<std::pair<int, double>> betas;
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != 2)
            throw ValidationError("config: betas entries must be [p, beta] pairs");
        betas.emplace_back(row[0].get<int>(), row[1].get<double>());
    }
    return betas;
}

} // namespace

ordered_json symmat_to_json(const SymMat& m) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < m.dim(); ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

SymMat symmat_from_json(const ordered_json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("config: matrix must be array of rows");
    const int dim = static_cast<int>(j.size());
    SymMat m(dim);
    for (int i = 0; i < dim; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != dim)
            throw ValidationError("config: matrix rows must have matching length");
        for (int c = 0; c <= i; ++c) {
            const double a = j[i][c].get<double>();
            const double b = j[c][i].get<double>();
            if (std::abs(a - b) > 1e-12)
                throw ValidationError("config: matrix must be symmetric");
            m.at(i, c) = 0.5 * (a + b);
        }
    }
    return m;
}

RunConfig parse_config(const ordered_json& j) {
    RunConfig cfg;
    if (const auto* c = find(j, "command")) cfg.command = c->get<std::string>();

    if (const auto* m = find(j, "model")) {
        const int dim = m->at("dim").get<int>();
        ModelKind kind = dim == 1 ? ModelKind::ScalarMixed : ModelKind::PottsHadamard;
        if (const auto* k = find(*m, "kind")) {
            const std::string name = k->get<std::string>();
            if (name == "scalar_mixed")
                kind = ModelKind::ScalarMixed;
            else if (name == "potts_hadamard")
                kind = ModelKind::PottsHadamard;
            else
                throw ValidationError("config: unknown model kind '" + name + "'");
        }
        cfg.model.emplace(dim, betas_from_json(m->at("betas")), kind);
    }

    if (const auto* p = find(j, "psi")) {
        if (const auto* preset = find(*p, "preset")) {
            const std::string name = preset->get<std::string>();
            if (name == "potts_star") {
                if (!cfg.model) throw ValidationError("config: potts_star preset needs a model");
                cfg.psi = MatrixPath::potts_star(cfg.model->dim());
            } else if (name == "linear_1d") {
                SymMat z(1);
                z.at(0, 0) = p->at("z").get<double>();
                cfg.psi = MatrixPath::linear(z);
            } else {
                throw ValidationError("config: unknown psi preset '" + name + "'");
            }
        } else if (const auto* knots = find(*p, "knots")) {
            std::vector<double> times;
            std::vector<SymMat> values;
            for (const auto& k : *knots) {
                times.push_back(k.at(0).get<double>());
                values.push_back(symmat_from_json(k.at(1)));
            }
            cfg.psi = MatrixPath(std::move(times), std::move(values));
        } else {
            throw ValidationError("config: psi needs a preset or knots");
        }
    }

    if (const auto* a = find(j, "alpha"))
        cfg.alpha = DiscreteCdf(a->at("qs").get<std::vector<double>>(),
                                a->at("ms").get<std::vector<double>>());

    if (const auto* b = find(j, "base")) {
        if (const auto* preset = find(*b, "preset")) {
            const std::string name = preset->get<std::string>();
            if (name == "ising")
                cfg.base = BaseMeasure::ising();
            else if (name == "potts_uniform") {
                const int dim = cfg.model ? cfg.model->dim() : b->at("dim").get<int>();
                cfg.base = BaseMeasure::potts_uniform(dim);
            } else
                throw ValidationError("config: unknown base preset '" + name + "'");
        } else if (const auto* atoms = find(*b, "atoms")) {
            std::vector<BaseMeasure::Atom> list;
            for (const auto& row : *atoms)
                list.push_back({row.at(0).get<std::vector<double>>(), row.at(1).get<double>()});
            const int dim = static_cast<int>(list.front().point.size());
            cfg.base = BaseMeasure(dim, std::move(list));
        } else {
            throw ValidationError("config: base needs a preset or atoms");
        }
    }

    if (const auto* x = find(j, "x")) cfg.eval_point = x->get<std::vector<double>>();

    if (const auto* g = find(j, "grid")) {
        if (const auto* l = find(*g, "half_width")) cfg.grid.half_width = l->get<double>();
        if (const auto* h = find(*g, "spacing")) cfg.grid.spacing = h->get<double>();
        if (const auto* q = find(*g, "quad_nodes")) cfg.grid.quad_nodes = q->get<int>();
    }

    if (const auto* m = find(j, "mc")) {
        if (const auto* v = find(*m, "seed")) cfg.mc.seed = v->get<std::uint64_t>();
        if (const auto* v = find(*m, "paths")) cfg.mc.paths = v->get<int>();
        if (const auto* v = find(*m, "steps")) cfg.mc.steps = v->get<int>();
        if (const auto* v = find(*m, "replications")) cfg.mc.replications = v->get<int>();
        if (const auto* v = find(*m, "leaf_budget")) cfg.mc.leaf_budget = v->get<long>();
        if (const auto* v = find(*m, "widths")) cfg.mc.widths = v->get<std::vector<int>>();
    }

    if (const auto* sd = find(j, "sde")) {
        if (const auto* v = find(*sd, "s")) cfg.sde.s = v->get<double>();
        if (const auto* v = find(*sd, "t")) cfg.sde.t = v->get<double>();
        if (const auto* v = find(*sd, "x")) cfg.sde.x = v->get<std::vector<double>>();
        if (const auto* v = find(*sd, "perturbations")) cfg.sde.perturbations = v->get<int>();
        if (const auto* v = find(*sd, "shift")) cfg.sde.shift = v->get<double>();
    }

    if (const auto* o = find(j, "optimize")) {
        if (const auto* v = find(*o, "q_grid")) cfg.optimize.q_grid = v->get<std::vector<double>>();
        if (const auto* v = find(*o, "tol_f")) cfg.optimize.tol_f = v->get<double>();
        if (const auto* v = find(*o, "tol_m")) cfg.optimize.tol_m = v->get<double>();
        if (const auto* v = find(*o, "max_iters")) cfg.optimize.max_iters = v->get<int>();
        if (const auto* v = find(*o, "fd_step")) cfg.optimize.fd_step = v->get<double>();
        if (const auto* v = find(*o, "starts")) cfg.optimize.starts = v->get<int>();
    }

    if (const auto* p = find(j, "potts")) {
        if (const auto* v = find(*p, "dim")) cfg.potts.dim = v->get<int>();
        if (const auto* v = find(*p, "betas")) cfg.potts.betas = betas_from_json(*v);
        if (const auto* v = find(*p, "case")) cfg.potts.experiment_case = v->get<std::string>();
        if (const auto* v = find(*p, "pairs")) cfg.potts.pairs = v->get<int>();
        if (const auto* v = find(*p, "x_samples")) cfg.potts.x_samples = v->get<int>();
        if (const auto* v = find(*p, "pde_checks")) cfg.potts.run_pde_checks = v->get<bool>();
    }

    if (const auto* v = find(j, "verify_seed")) cfg.verify_seed = v->get<std::uint64_t>();
    return cfg;
}

ordered_json config_to_json(const RunConfig& cfg) {
    ordered_json j;
    j["command"] = cfg.command;
    if (cfg.model) {
        ordered_json m;
        m["dim"] = cfg.model->dim();
        ordered_json betas = ordered_json::array();
        for (const auto& [p, b] : cfg.model->betas()) betas.push_back({p, b});
        m["betas"] = std::move(betas);
        m["kind"] = cfg.model->kind() == ModelKind::ScalarMixed ? "scalar_mixed" : "potts_hadamard";
        j["model"] = std::move(m);
    }
    if (cfg.psi) {
        ordered_json knots = ordered_json::array();
        for (std::size_t i = 0; i < cfg.psi->knot_times().size(); ++i)
            knots.push_back({cfg.psi->knot_times()[i], symmat_to_json(cfg.psi->knot_values()[i])});
        j["psi"] = ordered_json{{"knots", std::move(knots)}};
    }
    if (cfg.alpha) j["alpha"] = ordered_json{{"qs", cfg.alpha->qs()}, {"ms", cfg.alpha->ms()}};
    if (cfg.base) {
        ordered_json atoms = ordered_json::array();
        for (const auto& a : cfg.base->atoms()) atoms.push_back({a.point, a.weight});
        j["base"] = ordered_json{{"atoms", std::move(atoms)}};
    }
    if (!cfg.eval_point.empty()) j["x"] = cfg.eval_point;
    {
        ordered_json g;
        if (cfg.grid.half_width) g["half_width"] = *cfg.grid.half_width;
        g["spacing"] = cfg.grid.spacing;
        g["quad_nodes"] = cfg.grid.quad_nodes;
        j["grid"] = std::move(g);
    }
    j["mc"] = ordered_json{{"seed", cfg.mc.seed},
                           {"paths", cfg.mc.paths},
                           {"steps", cfg.mc.steps},
                           {"replications", cfg.mc.replications},
                           {"leaf_budget", cfg.mc.leaf_budget},
                           {"widths", cfg.mc.widths}};
    j["sde"] = ordered_json{{"s", cfg.sde.s},
                            {"t", cfg.sde.t},
                            {"x", cfg.sde.x},
                            {"perturbations", cfg.sde.perturbations},
                            {"shift", cfg.sde.shift}};
    j["optimize"] = ordered_json{{"q_grid", cfg.optimize.q_grid},
                                 {"tol_f", cfg.optimize.tol_f},
                                 {"tol_m", cfg.optimize.tol_m},
                                 {"max_iters", cfg.optimize.max_iters},
                                 {"fd_step", cfg.optimize.fd_step},
                                 {"starts", cfg.optimize.starts}};
    {
        ordered_json betas = ordered_json::array();
        for (const auto& [p, b] : cfg.potts.betas) betas.push_back({p, b});
        j["potts"] = ordered_json{{"dim", cfg.potts.dim},
                                  {"betas", std::move(betas)},
                                  {"case", cfg.potts.experiment_case},
                                  {"pairs", cfg.potts.pairs},
                                  {"x_samples", cfg.potts.x_samples},
                                  {"pde_checks", cfg.potts.run_pde_checks}};
    }
    j["verify_seed"] = cfg.verify_seed;
    return j;
}

namespace {

struct Resolved {
    MixtureModel model;
    MatrixPath psi;
    BaseMeasure base;
    DerivedPath derived;
    GridSpec spec;
    FunctionalOptions fopt;
};

Resolved resolve(const RunConfig& cfg, bool need_alpha) {
    if (!cfg.model) throw ValidationError("config: missing model");
    if (!cfg.psi) throw ValidationError("config: missing psi");
    if (!cfg.base) throw ValidationError("config: missing base");
    if (need_alpha && !cfg.alpha) throw ValidationError("config: missing alpha");
    DerivedPath derived(*cfg.model, *cfg.psi);
    const double half =
        cfg.grid.half_width ? *cfg.grid.half_width : default_half_width(*cfg.base, derived);
    const GridSpec spec = GridSpec::make(cfg.model->dim(), half, cfg.grid.spacing);
    FunctionalOptions fopt;
    fopt.pde.quad_nodes = cfg.grid.quad_nodes;
    fopt.eta_nodes = cfg.grid.quad_nodes;
    return Resolved{*cfg.model, *cfg.psi, *cfg.base, std::move(derived), spec, fopt};
}

ordered_json grid_meta(const GridSpec& spec) {
    return ordered_json{{"dim", spec.dim},
                        {"half_width", spec.half_width},
                        {"spacing", spec.spacing},
                        {"per_axis", spec.per_axis}};
}

void flatten_json(const ordered_json& j, const std::string& prefix, std::ostream& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            flatten_json(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        int i = 0;
        for (const auto& v : j) flatten_json(v, prefix + "[" + std::to_string(i++) + "]", out);
    } else {
        out << prefix << "," << j.dump() << "\n";
    }
}

ordered_json solution_to_json(const PdeSolution& sol) {
    ordered_json levels = ordered_json::array();
    for (std::size_t l = 0; l < sol.level_times().size(); ++l)
        levels.push_back(ordered_json{{"s", sol.level_times()[l]},
                                      {"values", sol.level(static_cast<int>(l)).values()}});
    return ordered_json{{"grid", grid_meta(sol.spec())},
                        {"alpha", {{"qs", sol.alpha().qs()}, {"ms", sol.alpha().ms()}}},
                        {"levels", std::move(levels)}};
}

void write_solution_csv(const PdeSolution& sol, std::ostream& out) {
    out << "level,s,flat_index,value\n";
    for (std::size_t l = 0; l < sol.level_times().size(); ++l) {
        const GridFn& fn = sol.level(static_cast<int>(l));
        for (std::size_t i = 0; i < fn.values().size(); ++i)
            out << l << "," << sol.level_times()[l] << "," << i << "," << fn.values()[i] << "\n";
    }
}

ordered_json run_eval_phi(const RunConfig& cfg, const CliOptions& opt) {
    Resolved r = resolve(cfg, true);
    std::vector<double> x = cfg.eval_point;
    if (x.empty()) x.assign(r.spec.dim, 0.0);
    if (static_cast<int>(x.size()) != r.spec.dim)
        throw ValidationError("eval-phi: x dimension mismatch");
    const PdeSolution sol = solve_pde(r.base, r.derived, *cfg.alpha, r.spec, r.fopt.pde);
    const double phi0 = sol.level(0).interpolate(x);

    ordered_json out;
    out["phi0"] = phi0;
    out["x"] = x;
    out["grid"] = grid_meta(r.spec);

    std::vector<int> widths = cfg.mc.widths;
    if (widths.empty()) widths = NestedSampler::widths_for(*cfg.alpha, cfg.mc.leaf_budget);
    NestedSampler sampler(*cfg.alpha, r.derived, r.base, widths, cfg.mc.seed);
    const McEstimate est = sampler.estimate_phi0(x, cfg.mc.replications);
    out["oracle"] = ordered_json{{"mean", est.mean},
                                 {"stderr", est.stderr_},
                                 {"widths", est.widths},
                                 {"seed", est.seed}};
    out["oracle_gap"] = std::abs(est.mean - phi0);

    if (!opt.output_dir.empty()) {
        std::filesystem::create_directories(opt.output_dir);
        std::ofstream js(std::filesystem::path(opt.output_dir) / "solution.json");
        js << solution_to_json(sol).dump(2) << "\n";
        std::ofstream cs(std::filesystem::path(opt.output_dir) / "solution.csv");
        write_solution_csv(sol, cs);
    }
    return out;
}

ordered_json run_eval_functional(const RunConfig& cfg) {
    Resolved r = resolve(cfg, true);
    const FunctionalValue f =
        evaluate_functional(r.model, r.psi, *cfg.alpha, r.base, r.spec, r.fopt);
    return ordered_json{{"total", f.total},
                        {"term_phi", f.term_phi},
                        {"term_theta", f.term_theta},
                        {"term_int", f.term_int},
                        {"grid", grid_meta(r.spec)}};
}

ordered_json run_minimize(const RunConfig& cfg, const CliOptions& opt) {
    Resolved r = resolve(cfg, false);
    OptimizeConfig ocfg;
    ocfg.q_grid = cfg.optimize.q_grid;
    ocfg.tol_f = cfg.optimize.tol_f;
    ocfg.tol_m = cfg.optimize.tol_m;
    ocfg.max_iters = cfg.optimize.max_iters;
    ocfg.fd_step = cfg.optimize.fd_step;

    const MinimizeResult res =
        minimize_functional(r.model, r.psi, r.base, ocfg, r.spec, r.fopt);
    if (!res.converged)
        throw NumericError("minimize: no convergence within max_iters (best value " +
                           std::to_string(res.value.total) + ")");

    ordered_json trace = ordered_json::array();
    for (const auto& it : res.trace)
        trace.push_back(ordered_json{
            {"iter", it.iter}, {"value", it.value}, {"grad_norm", it.grad_norm}, {"m", it.m}});
    ordered_json out{{"alpha_star", {{"qs", res.alpha.qs()}, {"ms", res.alpha.ms()}}},
                     {"value",
                      {{"total", res.value.total},
                       {"term_phi", res.value.term_phi},
                       {"term_theta", res.value.term_theta},
                       {"term_int", res.value.term_int}}},
                     {"converged", res.converged},
                     {"iterations", static_cast<int>(res.trace.size())},
                     {"trace", std::move(trace)},
                     {"grid", grid_meta(r.spec)}};

    if (!opt.output_dir.empty()) {
        std::filesystem::create_directories(opt.output_dir);
        std::ofstream cs(std::filesystem::path(opt.output_dir) / "trace.csv");
        cs << "iter,value,grad_norm";
        for (std::size_t l = 0; l + 1 < res.alpha.ms().size(); ++l) cs << ",m" << l;
        cs << "\n";
        for (const auto& it : res.trace) {
            cs << it.iter << "," << it.value << "," << it.grad_norm;
            for (double m : it.m) cs << "," << m;
            cs << "\n";
        }
    }
    return out;
}

ordered_json run_sde_check(const RunConfig& cfg) {
    Resolved r = resolve(cfg, true);
    const PdeSolution sol = solve_pde(r.base, r.derived, *cfg.alpha, r.spec, r.fopt.pde);

    ControlProblem cp;
    cp.solution = &sol;
    cp.s = cfg.sde.s;
    cp.t = cfg.sde.t;
    cp.x = cfg.sde.x.empty() ? std::vector<double>(r.spec.dim, 0.0) : cfg.sde.x;
    cp.n_paths = cfg.mc.paths;
    cp.n_steps = cfg.mc.steps;
    cp.seed = cfg.mc.seed;

    const SdeSimulation sim = simulate_optimal(cp);
    const ControlValue star = control_value(cp, sim, {ControlSpec::Kind::Optimal, {}, 1.0});
    const double phi_sx = sol.value(cp.s, cp.x);

    ordered_json perturbed = ordered_json::array();
    Rng rng(derive_stream(cp.seed, 0x3de));
    bool all_dominated = true;
    for (int i = 0; i < cfg.sde.perturbations; ++i) {
        std::vector<double> c(r.spec.dim);
        for (auto& v : c) v = cfg.sde.shift * (2.0 * rng.uniform() - 1.0);
        const ControlValue pv = control_value(cp, sim, {ControlSpec::Kind::Shifted, c, 1.0});
        const bool dominated = pv.mean <= star.mean + 3.0 * (pv.stderr_ + star.stderr_);
        all_dominated = all_dominated && dominated;
        perturbed.push_back(ordered_json{
            {"shift", c}, {"mean", pv.mean}, {"stderr", pv.stderr_}, {"dominated", dominated}});
    }

    const double c_hess = std::sqrt(double(r.spec.dim)) * max_hessian_norm(sol.level(0), 4);
    const WindowReport window = uniqueness_window_check(cp, c_hess);
    const MartingaleReport grad_mart = gradient_martingale_check(sim);
    const MartingaleReport hess_evo = hessian_evolution_check(sim);

    return ordered_json{
        {"phi_sx", phi_sx},
        {"control_value", {{"mean", star.mean}, {"stderr", star.stderr_}}},
        {"value_gap", std::abs(star.mean - phi_sx)},
        {"perturbed", std::move(perturbed)},
        {"all_perturbations_dominated", all_dominated},
        {"window",
         {{"integral", window.integral},
          {"bound", window.bound},
          {"window_ok", window.window_ok},
          {"alpha_positive", window.alpha_positive}}},
        {"gradient_martingale",
         {{"mean_gap", grad_mart.mean_gap},
          {"stderr", grad_mart.stderr_},
          {"max_sigmas", grad_mart.max_sigmas}}},
        {"hessian_evolution",
         {{"mean_gap", hess_evo.mean_gap},
          {"stderr", hess_evo.stderr_},
          {"max_sigmas", hess_evo.max_sigmas}}},
        {"exited_paths", sim.exited_paths},
        {"grid", grid_meta(r.spec)}};
}

ordered_json run_potts(const RunConfig& cfg) {
    const PottsJsonConfig& pc = cfg.potts;
    PottsSetup setup = make_potts_setup(pc.dim, pc.betas);
    std::string which = pc.experiment_case;
    if (which == "auto") which = setup.pure_quadratic() ? "quadratic" : "mixed";

    ordered_json out;
    out["dim"] = pc.dim;
    out["case"] = which;

    if (which == "quadratic") {
        if (!setup.pure_quadratic())
            throw ValidationError("potts: case 'quadratic' with higher-order terms present");
        const GammaAlgebraReport rep = potts_gamma_identities(setup);
        out["gamma_identities"] = ordered_json{{"err_closed_form", rep.err_closed_form},
                                               {"err_sum_outer", rep.err_sum_outer},
                                               {"err_square", rep.err_square},
                                               {"err_kernel", rep.err_kernel},
                                               {"err_hadamard", rep.err_hadamard},
                                               {"gamma", symmat_to_json(rep.gamma)},
                                               {"ok", rep.ok()}};
    } else {
        const GammaPdReport rep = potts_gamma_pd_check(setup);
        out["gamma_definiteness"] = ordered_json{{"min_eig_gamma", rep.min_eig_gamma},
                                                 {"min_eig_bound", rep.min_eig_bound},
                                                 {"min_eig_gamma_at_zero", rep.min_eig_gamma_at_zero},
                                                 {"pd_interior", rep.pd_interior}};
    }

    const GridSpec* spec_ptr = nullptr;
    GridSpec spec;
    if (pc.run_pde_checks && pc.dim <= 3) {
        DerivedPath derived(setup.model, setup.psi);
        const double half = cfg.grid.half_width ? *cfg.grid.half_width
                                                : default_half_width(setup.base, derived);
        spec = GridSpec::make(pc.dim, half, std::max(cfg.grid.spacing, pc.dim >= 3 ? 0.25 : 0.1));
        spec_ptr = &spec;
    }
    const DegenerateReport deg =
        potts_degenerate_directions(setup, pc.x_samples, cfg.mc.seed, spec_ptr);
    out["degenerate_directions"] = ordered_json{{"max_w_quad", deg.max_w_quad},
                                                {"min_v_quad", deg.min_v_quad},
                                                {"min_offkernel_quad", deg.min_offkernel_quad},
                                                {"min_v_quad_solution", deg.min_v_quad_solution},
                                                {"pde_checked", deg.pde_checked}};

    if (spec_ptr && pc.dim == 2) {
        const PottsExperimentReport rep =
            potts_convexity_experiment(setup, pc.pairs, cfg.mc.seed, *spec_ptr, 2);
        ordered_json e{{"convexity_min_slack", rep.convexity.min_slack},
                       {"convexity_all_positive", rep.convexity.all_positive},
                       {"multistart_m_spread", rep.multistart_m_spread},
                       {"multistart_value_spread", rep.multistart_value_spread},
                       {"starts", rep.starts}};
        if (rep.tilt_shift_error) {
            e["tilt_shift_error"] = *rep.tilt_shift_error;
            e["expected_tilt_shift"] = rep.expected_tilt_shift;
        }
        out["experiment"] = std::move(e);
    }
    return out;
}

ordered_json run_verify(const RunConfig& cfg, std::ostream& table) {
    const VerifyReport rep = run_verification(cfg.verify_seed);
    ordered_json checks = ordered_json::array();
    for (const auto& c : rep.checks) {
        checks.push_back(ordered_json{{"name", c.name},
                                      {"pass", c.pass},
                                      {"value", c.value},
                                      {"threshold", c.threshold},
                                      {"detail", c.detail}});
        table << (c.pass ? "[pass] " : "[FAIL] ") << c.name << "  (value " << c.value
              << ", threshold " << c.threshold << ")\n";
    }
    table << (rep.all_pass ? "all checks passed\n" : "SOME CHECKS FAILED\n");
    return ordered_json{{"seed", rep.seed}, {"all_pass", rep.all_pass}, {"checks", std::move(checks)}};
}

} // namespace

int run_command(const RunConfig& cfg_in, const CliOptions& opt, std::ostream& out,
                std::ostream& err) {
    RunConfig cfg = cfg_in;
    if (opt.threads > 0) set_parallel_threads(opt.threads);
    if (opt.seed) {
        cfg.mc.seed = *opt.seed;
        cfg.verify_seed = *opt.seed;
    }
    try {
        ordered_json report;
        if (cfg.command == "eval-phi")
            report = run_eval_phi(cfg, opt);
        else if (cfg.command == "eval-functional")
            report = run_eval_functional(cfg);
        else if (cfg.command == "minimize")
            report = run_minimize(cfg, opt);
        else if (cfg.command == "sde-check")
            report = run_sde_check(cfg);
        else if (cfg.command == "potts")
            report = run_potts(cfg);
        else if (cfg.command == "verify")
            report = run_verify(cfg, err);
        else
            throw ValidationError("unknown command '" + cfg.command + "'");

        if (!opt.no_meta) {
            const auto now = std::chrono::system_clock::now();
            report["meta"] = ordered_json{
                {"command", cfg.command},
                {"generated_at_ms",
                 std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch())
                     .count()}};
        }

        if (opt.format == "csv") {
            std::ostringstream flat;
            flat << "key,value\n";
            flatten_json(report, "", flat);
            out << flat.str();
        } else {
            out << report.dump(2) << "\n";
        }
        if (!opt.output_dir.empty()) {
            std::filesystem::create_directories(opt.output_dir);
            std::ofstream f(std::filesystem::path(opt.output_dir) /
                            ("report." + std::string(opt.format == "csv" ? "csv" : "json")));
            if (opt.format == "csv") {
                f << "key,value\n";
                std::ostringstream flat;
                flatten_json(report, "", flat);
                f << flat.str();
            } else {
                f << report.dump(2) << "\n";
            }
        }
        if (cfg.command == "verify" && !report["all_pass"].get<bool>()) return 2;
        return 0;
    } catch (const ValidationError& e) {
        err << ordered_json{{"error", {{"type", "validation"}, {"message", e.what()}}}}.dump()
            << "\n";
        return 1;
    } catch (const NumericError& e) {
        err << ordered_json{{"error", {{"type", "numerical"}, {"message", e.what()}}}}.dump()
            << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << ordered_json{{"error", {{"type", "internal"}, {"message", e.what()}}}}.dump()
            << "\n";
        return 2;
    }
}

} // namespace parisi
