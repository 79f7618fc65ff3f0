#pragma once

/**
 * \file surface.hpp
 * Self-referential boundary curves along grid lines, their partially blended
 * Coons patchwork, and parameter conditions keeping the blended surface
 * inside a box or above a plane.
 */

#include "fif/constraints.hpp"
#include "fif/rq_spline.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace fif::surface {

/// Dense row-major matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Rectangular grid (m x-knots by n y-knots) with values and both partials.
struct SurfaceGridData {
    core::KnotVector x;
    core::KnotVector y;
    Matrix values; ///< z(i, j) at (x_i, y_j)
    Matrix ddx;    ///< x-partials
    Matrix ddy;    ///< y-partials

    SurfaceGridData(core::KnotVector xk, core::KnotVector yk, Matrix z, Matrix zx, Matrix zy);
    static SurfaceGridData with_estimated_partials(core::KnotVector xk, core::KnotVector yk,
                                                   Matrix z);

    std::size_t m() const { return x.size(); }
    std::size_t n() const { return y.size(); }

    /// Univariate section along y = y_j (values and x-partials).
    rq::HermiteCurveData row_section(std::size_t j) const;
    /// Univariate section along x = x_i (values and y-partials).
    rq::HermiteCurveData col_section(std::size_t i) const;

    SurfaceGridData transposed() const;
};

/// Per-line curve parameters for the x-direction family: entry (i, j) is the
/// tension/scaling of subinterval i on the line y = y_j. Shape (m-1) x n.
struct XDirectionParams {
    Matrix scaling;
    Matrix shape;
};

/// Y-direction family: entry (i, j) belongs to subinterval j on the line
/// x = x_i. Shape m x (n-1).
struct YDirectionParams {
    Matrix scaling;
    Matrix shape;
};

/// One interpolating curve per horizontal grid line y = y_j.
std::vector<rq::RationalQuarticFIF> boundary_curves_x(const SurfaceGridData& data,
                                                      const XDirectionParams& params);

/// One interpolating curve per vertical grid line x = x_i.
std::vector<rq::RationalQuarticFIF> boundary_curves_y(const SurfaceGridData& data,
                                                      const YDirectionParams& params);

/// Cubic Hermite blenders ((1-t)^2 (1+2t), t^2 (3-2t)); nonnegative and
/// summing to one on [0, 1].
std::pair<double, double> hermite_blenders(double t);

struct SurfaceSamples {
    std::vector<double> x;
    std::vector<double> y;
    Matrix values;
};

/**
 * The blended patchwork: on each patch the two vertical boundary curves are
 * blended across x, the two horizontal ones across y, and the bilinear corner
 * correction is subtracted. Boundary curves are fixed-point sampled, so the
 * surface is exposed on the tensor lattice of those samples; off-lattice
 * queries are refused rather than interpolated.
 */
class BlendedSurface {
public:
    BlendedSurface(SurfaceGridData data, std::vector<core::FixedPointTable> row_tables,
                   std::vector<core::FixedPointTable> col_tables, std::size_t resolution);

    const SurfaceGridData& data() const { return data_; }
    std::size_t resolution() const { return resolution_; }
    const core::FixedPointTable& row_table(std::size_t j) const { return rows_[j]; }
    const core::FixedPointTable& col_table(std::size_t i) const { return cols_[i]; }

    const std::vector<double>& lattice_x() const { return lattice_x_; }
    const std::vector<double>& lattice_y() const { return lattice_y_; }

    /// Blend at local sample (k, l) of patch (i, j); k, l in [0, resolution].
    double patch_value(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const;

    /// Blend at global lattice indices.
    double lattice_value(std::size_t gx, std::size_t gy) const;

    SurfaceSamples sample_lattice() const;

private:
    SurfaceGridData data_;
    std::vector<core::FixedPointTable> rows_;
    std::vector<core::FixedPointTable> cols_;
    std::size_t resolution_;
    std::vector<double> lattice_x_, lattice_y_;
};

/// Builds both boundary families and samples them with the same resolution
/// and tolerance per line.
BlendedSurface blend_surface(const SurfaceGridData& data, const XDirectionParams& px,
                             const YDirectionParams& py, std::size_t resolution, double tol);

/// Blend value at (x, y); both coordinates must hit the sample lattice
/// (within a few ulps), otherwise a domain error is raised.
double coons_blend(const BlendedSurface& surface, double x, double y);

struct SurfaceFeasible {
    /// rows[j] covers the x-direction curve on y = y_j; cols[i] the
    /// y-direction curve on x = x_i.
    std::vector<constraints::FeasibleRange> rows;
    std::vector<constraints::FeasibleRange> cols;

    bool all_feasible() const {
        for (const auto& fr : rows)
            if (!fr.all_feasible()) return false;
        for (const auto& fr : cols)
            if (!fr.all_feasible()) return false;
        return true;
    }
};

/// Per-line parameter ranges keeping every boundary curve inside the band;
/// the blend inherits the band because the blenders are a nonnegative
/// partition of unity.
SurfaceFeasible surface_box_feasible(const SurfaceGridData& data,
                                     const constraints::RectangleConstraint& box);

/// Plane t(x, y) = c (1 - x/a - y/b).
struct PlaneConstraint {
    double a = 1.0;
    double b = 1.0;
    double c = 0.0;

    double value(double x, double y) const { return c * (1.0 - x / a - y / b); }
};

/// Per-line ranges keeping every boundary curve above the plane's trace on
/// its grid line; the blend then stays above the plane.
SurfaceFeasible surface_above_plane_feasible(const SurfaceGridData& data,
                                             const PlaneConstraint& plane);

/// Arithmetic-mean partials: x-partials estimated along each grid row,
/// y-partials along each grid column.
std::pair<Matrix, Matrix> estimate_partials(const core::KnotVector& x, const core::KnotVector& y,
                                            const Matrix& values);

} // namespace fif::surface
