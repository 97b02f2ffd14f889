#include "parisi/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parisi/errors.hpp"
#include "parisi/parallel.hpp"
#include "parisi/quadrature.hpp"
#include "parisi/rng.hpp"

namespace parisi {

namespace {

// 1-D linear interpolation on a contiguous line in index units, with
// end-slope extrapolation beyond [0, n-1].
inline double line_at(const double* line, int n, double u) {
    if (u <= 0.0) return line[0] + (line[1] - line[0]) * u;
    if (u >= n - 1) return line[n - 1] + (line[n - 1] - line[n - 2]) * (u - (n - 1));
    const int b = static_cast<int>(u);
    const double t = u - b;
    return line[b] + (line[b + 1] - line[b]) * t;
}

// Convolve every axis-d line of `values` with a Gaussian of standard
// deviation sigma (in coordinate units). log_domain folds with
// log-sum-exp, otherwise plainly. In-place.
void convolve_axis(std::vector<double>& values, const GridSpec& spec, int axis, double sigma,
                   bool log_domain, int quad_nodes) {
    const int n = spec.per_axis;
    const QuadRule& rule = gauss_hermite_normal(quad_nodes);
    const int nj = static_cast<int>(rule.nodes.size());
    std::vector<double> offsets(nj);
    std::vector<double> logw(nj);
    for (int j = 0; j < nj; ++j) {
        offsets[j] = sigma * rule.nodes[j] / spec.spacing;
        logw[j] = std::log(rule.weights[j]);
    }

    std::size_t stride = 1;
    for (int d = spec.dim - 1; d > axis; --d) stride *= n;
    const std::size_t n_lines = spec.total / n;

    parallel_for(n_lines, [&](std::size_t li) {
        // line start: distribute li over the non-axis dimensions
        const std::size_t outer = li / stride;   // index over dims before axis
        const std::size_t inner = li % stride;   // index over dims after axis
        const std::size_t start = outer * stride * n + inner;

        std::vector<double> in(n), out(n);
        for (int i = 0; i < n; ++i) in[i] = values[start + i * stride];
        if (log_domain) {
            for (int i = 0; i < n; ++i) {
                double best = -std::numeric_limits<double>::infinity();
                for (int j = 0; j < nj; ++j) {
                    const double e = logw[j] + line_at(in.data(), n, i + offsets[j]);
                    if (e > best) best = e;
                }
                double acc = 0.0;
                for (int j = 0; j < nj; ++j)
                    acc += std::exp(logw[j] + line_at(in.data(), n, i + offsets[j]) - best);
                out[i] = best + std::log(acc);
            }
        } else {
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < nj; ++j)
                    acc += rule.weights[j] * line_at(in.data(), n, i + offsets[j]);
                out[i] = acc;
            }
        }
        for (int i = 0; i < n; ++i) values[start + i * stride] = out[i];
    });
}

bool is_diagonal(const SymMat& m, double eps) {
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(m(i, j)) > eps) return false;
    return true;
}

// Resample onto the grid through an orthogonal change of coordinates:
// out(idx) = f(map(x_idx)) where map applies the rotation. Cubic
// interpolation keeps the resampling error smooth at the node level, so
// finite differences of later levels stay clean; the linear tail rule
// takes over outside the box.
GridFn resample(const GridFn& f, const SymEigen& eig, bool transpose) {
    const GridSpec& spec = f.spec();
    GridFn out(spec);
    parallel_for(spec.total, [&](std::size_t flat) {
        double x[SymMat::kMaxDim];
        double y[SymMat::kMaxDim];
        spec.point(flat, std::span<double>(x, spec.dim));
        for (int r = 0; r < spec.dim; ++r) {
            double s = 0.0;
            for (int k = 0; k < spec.dim; ++k)
                s += transpose ? eig.vector(k, r) * x[k] : eig.vector(r, k) * x[k];
            y[r] = s;
        }
        out[flat] = f.interpolate_smooth(std::span<const double>(y, spec.dim));
    });
    return out;
}

} // namespace

GridFn terminal_condition(const BaseMeasure& base, const GridSpec& spec) {
    if (base.dim() != spec.dim) throw ValidationError("terminal_condition: dimension mismatch");
    GridFn out(spec);
    parallel_for(spec.total, [&](std::size_t flat) {
        double x[SymMat::kMaxDim];
        spec.point(flat, std::span<double>(x, spec.dim));
        out[flat] = base.log_mgf(std::span<const double>(x, spec.dim));
    });
    return out;
}

GridFn propagate_level(const GridFn& f, const SymMat& cov, double m, const PdeOptions& opt) {
    const GridSpec& spec = f.spec();
    if (cov.dim() != spec.dim) throw ValidationError("propagate_level: dimension mismatch");
    if (m < 0.0 || m > 1.0) throw ValidationError("propagate_level: exponent outside [0, 1]");

    const double scale = 1.0 + cov.frobenius_norm();
    const bool diagonal = is_diagonal(cov, 1e-14 * scale);

    std::vector<double> lambdas;
    SymEigen eig;
    if (diagonal) {
        lambdas.resize(spec.dim);
        for (int d = 0; d < spec.dim; ++d) lambdas[d] = cov(d, d);
    } else {
        eig = eigen_sym(cov);
        lambdas = eig.values;
    }
    for (double& lam : lambdas) {
        if (lam < -opt.psd_slack * scale)
            throw NumericError("propagate_level: covariance increment is not PSD (eigenvalue " +
                               std::to_string(lam) + ")");
        if (lam < opt.rank_eps) lam = 0.0;
    }
    const bool any_active =
        std::any_of(lambdas.begin(), lambdas.end(), [](double l) { return l > 0.0; });
    if (!any_active) return f;

    const bool log_domain = m > 0.0;
    GridFn work = f;
    if (log_domain && m != 1.0)
        for (double& v : work.values()) v *= m;
    if (!diagonal) work = resample(work, eig, /*transpose=*/false);

    for (int d = 0; d < spec.dim; ++d) {
        if (lambdas[d] <= 0.0) continue;
        convolve_axis(work.values(), spec, d, std::sqrt(lambdas[d]), log_domain, opt.quad_nodes);
    }

    if (!diagonal) work = resample(work, eig, /*transpose=*/true);
    if (log_domain && m != 1.0)
        for (double& v : work.values()) v /= m;
    return work;
}

double default_half_width(const BaseMeasure& base, const DerivedPath& derived) {
    const double lam = std::max(0.0, max_eigenvalue(derived.mu(1.0)));
    const double sig = std::max(base.max_norm(), 1e-3);
    return 6.0 * sig * (1.0 + std::sqrt(lam));
}

PdeSolution::PdeSolution(BaseMeasure base, DerivedPath derived, DiscreteCdf alpha, GridSpec spec,
                         PdeOptions opt, std::vector<GridFn> levels, std::vector<double> times)
    : base_(std::move(base)),
      derived_(std::move(derived)),
      alpha_(std::move(alpha)),
      spec_(spec),
      opt_(opt),
      levels_(std::move(levels)),
      times_(std::move(times)) {}

GridFn PdeSolution::at_time(double s) const {
    if (s < 0.0 || s > 1.0) throw ValidationError("PdeSolution::at_time: s outside [0, 1]");
    for (std::size_t l = 0; l < times_.size(); ++l)
        if (std::abs(times_[l] - s) < 1e-15) return levels_[l];
    std::size_t l = 1;
    while (l + 1 < times_.size() && times_[l] <= s) ++l;
    // s in (times_[l-1], times_[l]): one extra propagation from above
    const SymMat cov = derived_.mu_increment(s, times_[l]);
    return propagate_level(levels_[l], cov, alpha_.ms()[l - 1], opt_);
}

double PdeSolution::value(double s, std::span<const double> x) const {
    return at_time(s).interpolate(x);
}

std::vector<double> PdeSolution::grad(double s, std::span<const double> x) const {
    std::vector<double> g(spec_.dim);
    at_time(s).gradient(x, g);
    return g;
}

SymMat PdeSolution::hess(double s, std::span<const double> x) const {
    return at_time(s).hessian(x);
}

PdeSolution solve_pde(const BaseMeasure& base, const DerivedPath& derived,
                      const DiscreteCdf& alpha, const GridSpec& spec, const PdeOptions& opt) {
    if (base.dim() != derived.dim() || base.dim() != spec.dim)
        throw ValidationError("solve_pde: dimension mismatch");
    const DiscreteCdf a = alpha.canonicalize();
    const int K = a.levels();
    std::vector<GridFn> levels(K + 1);
    levels[K] = terminal_condition(base, spec);
    for (int l = K; l >= 1; --l) {
        const SymMat cov = derived.mu_increment(a.qs()[l - 1], a.qs()[l]);
        levels[l - 1] = propagate_level(levels[l], cov, a.ms()[l - 1], opt);
    }
    return PdeSolution(base, derived, a, spec, opt, std::move(levels), a.qs());
}

GeneralSolve solve_pde_general(const BaseMeasure& base, const DerivedPath& derived,
                               const std::function<double(double)>& alpha, int n_approx,
                               const GridSpec& spec, const PdeOptions& opt) {
    if (n_approx < 1) throw ValidationError("solve_pde_general: n_approx must be >= 1");
    // left-endpoint staircase: reproduces step inputs already on this grid
    // exactly and stays within 1/n of any increasing CDF
    std::vector<double> qs(n_approx + 1);
    std::vector<double> ms(n_approx + 1);
    for (int l = 0; l <= n_approx; ++l) qs[l] = double(l) / n_approx;
    for (int l = 0; l < n_approx; ++l) {
        const double v = std::clamp(alpha(qs[l]), 0.0, 1.0);
        ms[l] = l > 0 ? std::max(v, ms[l - 1]) : v;
    }
    ms[n_approx] = 1.0;
    DiscreteCdf stair(qs, ms);

    // L1 distance to the requested CDF by midpoint Riemann sum
    const int cells = 4096;
    double dist = 0.0;
    for (int i = 0; i < cells; ++i) {
        const double s = (i + 0.5) / cells;
        dist += std::abs(stair.evaluate(s) - std::clamp(alpha(s), 0.0, 1.0)) / cells;
    }

    GeneralSolve out{solve_pde(base, derived, stair, spec, opt), stair, dist,
                     derived.lipschitz_mu() * dist};
    return out;
}

ResidualReport pde_residual(const PdeSolution& sol,
                            const std::optional<std::function<double(double)>>& alpha_cts,
                            int max_x_samples, std::uint64_t seed) {
    const GridSpec& spec = sol.spec();
    const DiscreteCdf& a = sol.alpha();
    const int margin = 3;
    if (spec.per_axis <= 2 * margin)
        throw ValidationError("pde_residual: grid too small for interior stencils");

    Rng rng(derive_stream(seed, 0x9de));
    ResidualReport rep;
    double acc = 0.0;

    for (int l = 1; l < static_cast<int>(a.qs().size()); ++l) {
        const double lo = a.qs()[l - 1], hi = a.qs()[l];
        if (hi - lo < 1e-6) continue;
        const double mid = 0.5 * (lo + hi);
        const double delta = 0.25 * (hi - lo);
        const GridFn minus = sol.at_time(mid - delta);
        const GridFn plus = sol.at_time(mid + delta);
        const GridFn center = sol.at_time(mid);
        const SymMat gamma = sol.derived().gamma(mid);
        const double av = alpha_cts ? (*alpha_cts)(mid) : a.ms()[l - 1];

        for (int it = 0; it < max_x_samples; ++it) {
            double x[SymMat::kMaxDim];
            std::size_t flat = 0;
            for (int d = 0; d < spec.dim; ++d) {
                const int i = margin +
                              static_cast<int>(rng.uniform() * (spec.per_axis - 2 * margin));
                x[d] = spec.coord(i);
                flat = flat * spec.per_axis + static_cast<std::size_t>(i);
            }
            const std::span<const double> xs(x, spec.dim);
            const double ds = (plus[flat] - minus[flat]) / (2.0 * delta);
            double g[SymMat::kMaxDim];
            center.gradient(xs, std::span<double>(g, spec.dim));
            const SymMat hess = center.hessian(xs);
            const SymMat outer = SymMat::outer(std::span<const double>(g, spec.dim));
            const double resid = ds + 0.5 * dot(gamma, hess + av * outer);
            rep.max_abs = std::max(rep.max_abs, std::abs(resid));
            acc += std::abs(resid);
            ++rep.points;
        }
    }
    rep.mean_abs = rep.points > 0 ? acc / rep.points : 0.0;
    return rep;
}

ExpMartingaleStat exp_martingale_stat(const PdeSolution& sol, double s,
                                      std::span<const double> x, int n_samples,
                                      std::uint64_t seed) {
    const DiscreteCdf& a = sol.alpha();
    const int dim = sol.spec().dim;
    const int K = a.levels();
    if (s >= 1.0) return {1.0, 0.0, n_samples};

    int piece = 1;
    while (piece < K && a.qs()[piece] <= s) ++piece;
    // s lives in [q_{piece-1}, q_piece)
    const GridFn at_s = sol.at_time(s);
    const double phi_s = at_s.interpolate(x);

    std::vector<SymMat> roots;   // increments s -> q_piece -> ... -> q_K
    roots.push_back(sqrt_psd(sol.derived().mu_increment(s, a.qs()[piece]), 1e-9));
    for (int k = piece + 1; k <= K; ++k)
        roots.push_back(sqrt_psd(sol.derived().mu_increment(a.qs()[k - 1], a.qs()[k]), 1e-9));

    std::vector<double> samples(n_samples);
    parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t it) {
        Rng rng(derive_stream(seed, it));
        double cum[SymMat::kMaxDim] = {};
        double g[SymMat::kMaxDim];
        double dz[SymMat::kMaxDim];
        double v = -a.ms()[piece - 1] * phi_s;
        for (int k = piece; k <= K; ++k) {
            for (int d = 0; d < dim; ++d) g[d] = rng.normal();
            roots[k - piece].apply(std::span<const double>(g, dim), std::span<double>(dz, dim));
            double y[SymMat::kMaxDim];
            for (int d = 0; d < dim; ++d) {
                cum[d] += dz[d];
                y[d] = x[d] + cum[d];
            }
            const double mass = a.ms()[k] - a.ms()[k - 1];
            const double phi_k = sol.level(k).interpolate(std::span<const double>(y, dim));
            v -= mass * phi_k;
            if (k == K) v += phi_k;   // terminal term reuses the same field
        }
        samples[it] = std::exp(v);
    });

    ExpMartingaleStat stat;
    stat.samples = n_samples;
    for (double v : samples) stat.mean += v;
    stat.mean /= n_samples;
    double ss = 0.0;
    for (double v : samples) ss += (v - stat.mean) * (v - stat.mean);
    stat.stderr_ = std::sqrt(ss / (n_samples - 1.0) / n_samples);
    return stat;
}

double max_hessian_norm(const GridFn& level, int stride, double fraction) {
    const GridSpec& spec = level.spec();
    const int center = spec.origin_index();
    const int reach = std::max(1, static_cast<int>(fraction * center));
    const int lo = center - reach;
    const int hi = center + reach;
    double best = 0.0;
    std::vector<int> idx(spec.dim, lo);
    bool done = false;
    while (!done) {
        double x[SymMat::kMaxDim];
        for (int d = 0; d < spec.dim; ++d) x[d] = spec.coord(idx[d]);
        best = std::max(best,
                        level.hessian(std::span<const double>(x, spec.dim)).frobenius_norm());
        // advance strided odometer
        int d = spec.dim - 1;
        while (d >= 0) {
            idx[d] += stride;
            if (idx[d] <= hi) break;
            idx[d] = lo;
            --d;
        }
        done = d < 0;
    }
    return best;
}

} // namespace parisi
