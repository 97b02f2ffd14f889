#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "parisi/symmat.hpp"

namespace parisi {

/// Uniform symmetric tensor grid over [-L, L]^D. The origin is always a
/// grid point; half_width is rounded to a multiple of the spacing.
struct GridSpec {
    int dim = 1;
    double half_width = 6.0;
    double spacing = 0.05;
    int per_axis = 0;
    std::size_t total = 0;

    static GridSpec make(int dim, double half_width, double spacing);

    double coord(int i) const { return -half_width + i * spacing; }
    int origin_index() const { return (per_axis - 1) / 2; }

    /// flat index -> multi-index
    void unflatten(std::size_t flat, std::span<int> idx) const;
    std::size_t flatten(std::span<const int> idx) const;
    void point(std::size_t flat, std::span<double> x) const;

    bool operator==(const GridSpec& o) const {
        return dim == o.dim && half_width == o.half_width && spacing == o.spacing;
    }
};

/// Scalar function sampled on a GridSpec, with multilinear interpolation
/// inside the box and linear-growth extrapolation outside (the slope at
/// the projected boundary point is continued, with no bilinear cross
/// terms, so far-field growth stays linear per axis).
class GridFn {
public:
    GridFn() = default;
    explicit GridFn(const GridSpec& spec) : spec_(spec), v_(spec.total, 0.0) {}
    GridFn(const GridSpec& spec, std::vector<double> values);

    const GridSpec& spec() const { return spec_; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    double operator[](std::size_t flat) const { return v_[flat]; }
    double& operator[](std::size_t flat) { return v_[flat]; }

    double interpolate(std::span<const double> x) const;

    /// Separable Catmull-Rom interpolation: node-exact, C^1, fourth-order
    /// inside the box; falls back to the multilinear rule within one cell
    /// of the boundary and outside. Used where downstream finite
    /// differences would amplify cell-level interpolation noise.
    double interpolate_smooth(std::span<const double> x) const;

    /// Central-difference gradient at x with step = grid spacing.
    void gradient(std::span<const double> x, std::span<double> g) const;
    /// Central-difference Hessian at x with step = grid spacing.
    SymMat hessian(std::span<const double> x) const;

    double max_abs() const;

private:
    GridSpec spec_;
    std::vector<double> v_;
};

/// Difference ||a - b||_inf over grid values (specs must match).
double sup_difference(const GridFn& a, const GridFn& b);

} // namespace parisi
