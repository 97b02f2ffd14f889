#include "parisi/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parisi/errors.hpp"

namespace parisi {

GridSpec GridSpec::make(int dim, double half_width, double spacing) {
    if (dim < 1 || dim > SymMat::kMaxDim) throw ValidationError("GridSpec: bad dim");
    if (spacing <= 0.0 || half_width <= 0.0) throw ValidationError("GridSpec: bad geometry");
    GridSpec s;
    s.dim = dim;
    s.spacing = spacing;
    const int half_points = std::max(1, static_cast<int>(std::lround(half_width / spacing)));
    s.per_axis = 2 * half_points + 1;
    s.half_width = half_points * spacing;
    s.total = 1;
    for (int d = 0; d < dim; ++d) {
        s.total *= static_cast<std::size_t>(s.per_axis);
        if (s.total > (std::size_t(1) << 30))
            throw ValidationError("GridSpec: grid too large");
    }
    return s;
}

void GridSpec::unflatten(std::size_t flat, std::span<int> idx) const {
    for (int d = dim - 1; d >= 0; --d) {
        idx[d] = static_cast<int>(flat % per_axis);
        flat /= per_axis;
    }
}

std::size_t GridSpec::flatten(std::span<const int> idx) const {
    std::size_t flat = 0;
    for (int d = 0; d < dim; ++d) flat = flat * per_axis + idx[d];
    return flat;
}

void GridSpec::point(std::size_t flat, std::span<double> x) const {
    for (int d = dim - 1; d >= 0; --d) {
        x[d] = coord(static_cast<int>(flat % per_axis));
        flat /= per_axis;
    }
}

GridFn::GridFn(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), v_(std::move(values)) {
    if (v_.size() != spec_.total) throw ValidationError("GridFn: value count mismatch");
}

double GridFn::interpolate(std::span<const double> x) const {
    const int dim = spec_.dim;
    const int n = spec_.per_axis;
    int base[SymMat::kMaxDim];
    double t[SymMat::kMaxDim];
    double over[SymMat::kMaxDim];
    for (int d = 0; d < dim; ++d) {
        double u = (x[d] + spec_.half_width) / spec_.spacing;
        const double uc = std::clamp(u, 0.0, double(n - 1));
        over[d] = u - uc;
        int b = static_cast<int>(std::floor(uc));
        b = std::clamp(b, 0, n - 2);
        base[d] = b;
        t[d] = uc - b;
    }
    // multilinear value at the clamped point plus per-axis slope times overshoot
    double value = 0.0;
    double slope[SymMat::kMaxDim] = {};
    const int corners = 1 << dim;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t flat = 0;
        for (int d = 0; d < dim; ++d) {
            const int bit = (c >> d) & 1;
            w *= bit ? t[d] : 1.0 - t[d];
            flat = flat * n + static_cast<std::size_t>(base[d] + bit);
        }
        const double fv = v_[flat];
        value += w * fv;
        for (int d = 0; d < dim; ++d) {
            if (over[d] == 0.0) continue;
            double dw = 1.0;
            for (int e = 0; e < dim; ++e) {
                const int bit = (c >> e) & 1;
                if (e == d)
                    dw *= bit ? 1.0 : -1.0;
                else
                    dw *= bit ? t[e] : 1.0 - t[e];
            }
            slope[d] += dw * fv;
        }
    }
    for (int d = 0; d < dim; ++d)
        if (over[d] != 0.0) value += slope[d] * over[d];
    return value;
}

double GridFn::interpolate_smooth(std::span<const double> x) const {
    const int dim = spec_.dim;
    const int n = spec_.per_axis;
    int base[SymMat::kMaxDim];
    double w[SymMat::kMaxDim][4];
    for (int d = 0; d < dim; ++d) {
        const double u = (x[d] + spec_.half_width) / spec_.spacing;
        const int b = static_cast<int>(std::floor(u));
        if (b < 1 || b > n - 3) return interpolate(x);
        const double t = u - b;
        base[d] = b - 1;
        const double t2 = t * t, t3 = t2 * t;
        w[d][0] = -0.5 * t3 + t2 - 0.5 * t;
        w[d][1] = 1.5 * t3 - 2.5 * t2 + 1.0;
        w[d][2] = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
        w[d][3] = 0.5 * t3 - 0.5 * t2;
    }
    int powers = 1;
    for (int d = 0; d < dim; ++d) powers *= 4;
    double value = 0.0;
    for (int c = 0; c < powers; ++c) {
        double weight = 1.0;
        std::size_t flat = 0;
        int code = c;
        for (int d = 0; d < dim; ++d) {
            const int off = code % 4;
            code /= 4;
            weight *= w[d][off];
            flat = flat * n + static_cast<std::size_t>(base[d] + off);
        }
        value += weight * v_[flat];
    }
    return value;
}

void GridFn::gradient(std::span<const double> x, std::span<double> g) const {
    const int dim = spec_.dim;
    double probe[SymMat::kMaxDim];
    for (int d = 0; d < dim; ++d) probe[d] = x[d];
    for (int d = 0; d < dim; ++d) {
        probe[d] = x[d] + spec_.spacing;
        const double plus = interpolate(std::span<const double>(probe, dim));
        probe[d] = x[d] - spec_.spacing;
        const double minus = interpolate(std::span<const double>(probe, dim));
        probe[d] = x[d];
        g[d] = (plus - minus) / (2.0 * spec_.spacing);
    }
}

SymMat GridFn::hessian(std::span<const double> x) const {
    const int dim = spec_.dim;
    const double h = spec_.spacing;
    SymMat out(dim);
    double probe[SymMat::kMaxDim];
    for (int d = 0; d < dim; ++d) probe[d] = x[d];
    const double center = interpolate(std::span<const double>(probe, dim));
    for (int i = 0; i < dim; ++i) {
        probe[i] = x[i] + h;
        const double plus = interpolate(std::span<const double>(probe, dim));
        probe[i] = x[i] - h;
        const double minus = interpolate(std::span<const double>(probe, dim));
        probe[i] = x[i];
        out.at(i, i) = (plus - 2.0 * center + minus) / (h * h);
        for (int j = 0; j < i; ++j) {
            probe[i] = x[i] + h; probe[j] = x[j] + h;
            const double pp = interpolate(std::span<const double>(probe, dim));
            probe[j] = x[j] - h;
            const double pm = interpolate(std::span<const double>(probe, dim));
            probe[i] = x[i] - h;
            const double mm = interpolate(std::span<const double>(probe, dim));
            probe[j] = x[j] + h;
            const double mp = interpolate(std::span<const double>(probe, dim));
            probe[i] = x[i]; probe[j] = x[j];
            out.at(i, j) = (pp - pm - mp + mm) / (4.0 * h * h);
        }
    }
    return out;
}

double GridFn::max_abs() const {
    double m = 0.0;
    for (double v : v_) m = std::max(m, std::abs(v));
    return m;
}

double sup_difference(const GridFn& a, const GridFn& b) {
    if (!(a.spec() == b.spec())) throw ValidationError("sup_difference: grid mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i)
        m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

} // namespace parisi
