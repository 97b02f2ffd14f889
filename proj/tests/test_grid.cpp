#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "parisi/errors.hpp"
#include "parisi/grid.hpp"
#include "parisi/rng.hpp"

using namespace parisi;

namespace {

GridFn sample(const GridSpec& spec, double (*f)(const double*, int)) {
    GridFn g(spec);
    std::vector<double> x(spec.dim);
    for (std::size_t i = 0; i < spec.total; ++i) {
        spec.point(i, x);
        g[i] = f(x.data(), spec.dim);
    }
    return g;
}

double affine(const double* x, int dim) {
    double v = 0.3;
    for (int d = 0; d < dim; ++d) v += (d + 1) * 0.5 * x[d];
    return v;
}

double quadratic(const double* x, int dim) {
    double v = 0.0;
    for (int d = 0; d < dim; ++d) v += (d + 1) * x[d] * x[d] + 0.25 * x[d] * x[(d + 1) % dim];
    return v;
}

} // namespace

TEST_CASE("grid geometry") {
    const GridSpec spec = GridSpec::make(2, 3.0, 0.5);
    CHECK(spec.per_axis == 13);
    CHECK(spec.total == 169);
    CHECK(spec.coord(spec.origin_index()) == doctest::Approx(0.0));

    std::vector<int> idx(2);
    std::vector<double> x(2);
    for (std::size_t flat : {std::size_t(0), std::size_t(37), spec.total - 1}) {
        spec.unflatten(flat, idx);
        CHECK(spec.flatten(idx) == flat);
        spec.point(flat, x);
        CHECK(x[0] == doctest::Approx(spec.coord(idx[0])));
        CHECK(x[1] == doctest::Approx(spec.coord(idx[1])));
    }
    CHECK_THROWS_AS(GridSpec::make(2, -1.0, 0.1), ValidationError);
}

TEST_CASE("interpolation is exact on affine functions, including outside the box") {
    for (int dim : {1, 2, 3}) {
        const GridSpec spec = GridSpec::make(dim, 2.0, 0.25);
        const GridFn g = sample(spec, affine);
        Rng rng(31);
        for (int it = 0; it < 200; ++it) {
            std::vector<double> x(dim);
            for (auto& c : x) c = (rng.uniform() - 0.5) * 8.0;   // up to 2x beyond the box
            CHECK(std::abs(g.interpolate(x) - affine(x.data(), dim)) <= 1e-12);
        }
    }
}

TEST_CASE("extrapolation grows linearly, not bilinearly") {
    const GridSpec spec = GridSpec::make(2, 1.0, 0.25);
    GridFn g(spec);
    std::vector<double> x(2);
    for (std::size_t i = 0; i < spec.total; ++i) {
        spec.point(i, x);
        g[i] = x[0] * x[1];
    }
    // along the diagonal outside the box a bilinear continuation would grow
    // like d^2; the per-axis linear continuation stays O(d)
    const double d = 6.0;
    const double probe[2] = {d, d};
    CHECK(std::abs(g.interpolate(probe)) < 3.0 * d);
}

TEST_CASE("finite-difference gradient and hessian on a quadratic") {
    const GridSpec spec = GridSpec::make(2, 3.0, 0.1);
    const GridFn g = sample(spec, quadratic);
    const double x[2] = {0.4, -0.7};
    double grad[2];
    g.gradient(x, grad);
    CHECK(grad[0] == doctest::Approx(2.0 * x[0] + 0.25 * x[1] + 0.25 * x[1]).epsilon(1e-8));
    const SymMat h = g.hessian(x);
    CHECK(h(0, 0) == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(h(1, 1) == doctest::Approx(4.0).epsilon(1e-7));
    CHECK(h(1, 0) == doctest::Approx(0.5).epsilon(1e-6));
}
