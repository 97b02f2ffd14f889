#include "parisi/potts.hpp"

#include <algorithm>
#include <cmath>

#include "parisi/errors.hpp"
#include "parisi/functional.hpp"
#include "parisi/rng.hpp"

namespace parisi {

std::vector<double> potts_w(int dim) { return std::vector<double>(dim, 1.0); }

std::vector<double> potts_v(int dim, int k) {
    std::vector<double> v(dim, -1.0);
    v[k] += dim;
    return v;
}

bool PottsSetup::pure_quadratic() const {
    for (const auto& [p, beta] : model.betas())
        if (p >= 3 && beta > 0.0) return false;
    return true;
}

PottsSetup make_potts_setup(int dim, std::vector<std::pair<int, double>> betas) {
    if (dim < 2) throw ValidationError("make_potts_setup: dim must be >= 2");
    MixtureModel model(dim, std::move(betas));
    BaseMeasure base = BaseMeasure::potts_uniform(dim);
    MatrixPath psi = MatrixPath::potts_star(dim);
    SymMat z = psi.endpoint();
    return PottsSetup{dim, std::move(model), std::move(base), std::move(psi), std::move(z)};
}

bool GammaAlgebraReport::ok(double tol) const {
    return err_closed_form <= tol && err_sum_outer <= tol && err_square <= tol &&
           err_kernel <= tol && err_hadamard <= 1e-14 && err_sum_outer_exact == 0.0;
}

GammaAlgebraReport potts_gamma_identities(const PottsSetup& setup) {
    if (!setup.pure_quadratic())
        throw ValidationError("potts_gamma_identities: identities hold for the quadratic case only");
    double b2 = 0.0;
    for (const auto& [p, beta] : setup.model.betas())
        if (p == 2) b2 = beta;
    const int D = setup.dim;
    const DerivedPath derived(setup.model, setup.psi);

    GammaAlgebraReport rep;
    rep.gamma = derived.gamma(0.5);

    const SymMat closed =
        (2.0 * b2 * b2 / (double(D) * D)) * (double(D) * SymMat::identity(D) - SymMat::all_ones(D));
    rep.err_closed_form = (rep.gamma - closed).frobenius_norm();

    SymMat sum_outer(D);
    for (int k = 0; k < D; ++k) sum_outer += SymMat::outer(potts_v(D, k));
    rep.err_sum_outer = (rep.gamma - (2.0 * b2 * b2 / (double(D) * D * D)) * sum_outer)
                            .frobenius_norm();
    rep.err_sum_outer_exact =
        (sum_outer - (double(D) * D * SymMat::identity(D) - double(D) * SymMat::all_ones(D)))
            .frobenius_norm();

    rep.err_square = (rep.gamma.square() - (2.0 * b2 * b2 / D) * rep.gamma).frobenius_norm();

    const std::vector<double> w = potts_w(D);
    std::vector<double> gw(D);
    rep.gamma.apply(w, gw);
    double kn = 0.0;
    for (double v : gw) kn += v * v;
    rep.err_kernel = std::sqrt(kn);

    // Hadamard identity along the path, checked at a spread of times
    for (int i = 0; i <= 10; ++i) {
        const double s = i / 10.0;
        const SymMat psi_s = setup.psi.value(s);
        const SymMat psidot = setup.psi.derivative(s);
        const SymMat lhs = psi_s.hadamard(psidot);
        const SymMat rhs = (s * (D - 1.0) / (double(D) * D * D)) * SymMat::identity(D) +
                           ((1.0 - s) / (double(D) * D)) * psidot;
        rep.err_hadamard = std::max(rep.err_hadamard, (lhs - rhs).frobenius_norm());
    }
    return rep;
}

GammaPdReport potts_gamma_pd_check(const PottsSetup& setup, int s_samples) {
    if (setup.pure_quadratic())
        throw ValidationError("potts_gamma_pd_check: needs a mixture term with p >= 3");
    const DerivedPath derived(setup.model, setup.psi);
    GammaPdReport rep;
    rep.min_eig_gamma = std::numeric_limits<double>::infinity();
    rep.min_eig_bound = std::numeric_limits<double>::infinity();

    int p_star = 0;
    double beta_star = 0.0;
    for (const auto& [p, beta] : setup.model.betas())
        if (p >= 3 && beta > 0.0 && p_star == 0) {
            p_star = p;
            beta_star = beta;
        }

    for (int i = 1; i <= s_samples; ++i) {
        const double s = double(i) / s_samples;   // (0, 1]
        rep.min_eig_gamma = std::min(rep.min_eig_gamma, min_eigenvalue(derived.gamma(s)));
        const SymMat psi_s = setup.psi.value(s);
        const SymMat bound = double(p_star) * (p_star - 1) * beta_star * beta_star *
                             psi_s.hadamard_power(p_star - 3)
                                 .hadamard(psi_s.hadamard(setup.psi.derivative(s)));
        rep.min_eig_bound = std::min(rep.min_eig_bound, min_eigenvalue(bound));
    }
    rep.min_eig_gamma_at_zero = min_eigenvalue(derived.gamma(0.0));
    rep.pd_interior = rep.min_eig_gamma > 0.0 && rep.min_eig_bound > 0.0;
    return rep;
}

DegenerateReport potts_degenerate_directions(const PottsSetup& setup, int x_samples,
                                             std::uint64_t seed, const GridSpec* spec) {
    const int D = setup.dim;
    Rng rng(derive_stream(seed, 0xDE6));
    DegenerateReport rep;
    rep.min_v_quad = std::numeric_limits<double>::infinity();
    rep.min_offkernel_quad = std::numeric_limits<double>::infinity();

    const std::vector<double> w = potts_w(D);
    for (int it = 0; it < x_samples; ++it) {
        std::vector<double> x(D);
        for (auto& c : x) c = 3.0 * rng.normal();
        const SymMat hess = setup.base.log_mgf_hessian(x);
        rep.max_w_quad = std::max(rep.max_w_quad, std::abs(hess.quad_form(w)));
        for (int k = 0; k < D; ++k)
            rep.min_v_quad = std::min(rep.min_v_quad, hess.quad_form(potts_v(D, k)));
        // a random direction with the mean removed, guaranteed off the kernel
        std::vector<double> y(D);
        double mean = 0.0;
        for (auto& c : y) {
            c = rng.normal();
            mean += c / D;
        }
        double norm = 0.0;
        for (auto& c : y) {
            c -= mean;
            norm += c * c;
        }
        if (norm < 1e-8) continue;
        rep.min_offkernel_quad = std::min(rep.min_offkernel_quad, hess.quad_form(y) / norm);
    }

    if (spec) {
        rep.pde_checked = true;
        rep.min_v_quad_solution = std::numeric_limits<double>::infinity();
        const DerivedPath derived(setup.model, setup.psi);
        const DiscreteCdf alpha({0.0, 0.5, 1.0}, {0.2, 0.7, 1.0});
        const PdeSolution sol = solve_pde(setup.base, derived, alpha, *spec);
        for (double s : {0.1, 0.5, 0.9}) {
            const GridFn level = sol.at_time(s);
            for (int it = 0; it < std::max(1, x_samples / 10); ++it) {
                std::vector<double> x(D);
                for (auto& c : x)
                    c = (rng.uniform() - 0.5) * spec->half_width;
                const SymMat hess = level.hessian(x);
                for (int k = 0; k < D; ++k)
                    rep.min_v_quad_solution =
                        std::min(rep.min_v_quad_solution, hess.quad_form(potts_v(D, k)));
            }
        }
    }
    return rep;
}

PottsExperimentReport potts_convexity_experiment(const PottsSetup& setup, int pairs,
                                                 std::uint64_t seed, const GridSpec& spec,
                                                 int starts) {
    PottsExperimentReport rep;
    const std::vector<double> q_grid{0.0, 0.5, 1.0};
    rep.convexity =
        certify_convexity(setup.model, setup.psi, setup.base, q_grid, pairs, seed, spec);

    if (setup.pure_quadratic()) {
        double b2 = 0.0;
        for (const auto& [p, beta] : setup.model.betas())
            if (p == 2) b2 = beta;
        rep.expected_tilt_shift = -b2 * b2 / setup.dim;
        const DerivedPath derived(setup.model, setup.psi);
        const DiscreteCdf alpha = DiscreteCdf::one_step(0.5, 0.5);
        const BaseMeasure tilted = tilt(setup.base, setup.model, setup.z);
        const PdeSolution plain = solve_pde(setup.base, derived, alpha, spec);
        const PdeSolution shifted = solve_pde(tilted, derived, alpha, spec);
        double worst = 0.0;
        for (std::size_t i = 0; i < plain.level(0).values().size(); ++i)
            worst = std::max(worst, std::abs(shifted.level(0).values()[i] -
                                             plain.level(0).values()[i] -
                                             rep.expected_tilt_shift));
        rep.tilt_shift_error = worst;
    }

    OptimizeConfig cfg;
    cfg.q_grid = q_grid;
    cfg.max_iters = 60;
    cfg.tol_f = 1e-8;
    cfg.tol_m = 1e-4;
    rep.starts = starts;
    Rng rng(derive_stream(seed, 0x5742));
    std::vector<std::vector<double>> minima;
    std::vector<double> values;
    for (int i = 0; i < starts; ++i) {
        std::vector<double> init(q_grid.size() - 1);
        for (auto& v : init) v = rng.uniform();
        std::sort(init.begin(), init.end());
        const MinimizeResult res =
            minimize_functional(setup.model, setup.psi, setup.base, cfg, spec, {}, &init);
        std::vector<double> m(res.alpha.ms().begin(), res.alpha.ms().end() - 1);
        minima.push_back(m);
        values.push_back(res.value.total);
    }
    for (std::size_t i = 1; i < minima.size(); ++i) {
        for (std::size_t l = 0; l < minima[i].size(); ++l)
            rep.multistart_m_spread =
                std::max(rep.multistart_m_spread, std::abs(minima[i][l] - minima[0][l]));
        rep.multistart_value_spread =
            std::max(rep.multistart_value_spread, std::abs(values[i] - values[0]));
    }
    return rep;
}

} // namespace parisi
