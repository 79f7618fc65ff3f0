#include "fif/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fif::surface {

namespace {

std::string cell(std::size_t i, std::size_t j) {
    return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

void check_shape(const Matrix& mat, std::size_t rows, std::size_t cols, const char* what) {
    if (mat.rows != rows || mat.cols != cols)
        throw std::invalid_argument(std::string(what) + " must be " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + ", got " + std::to_string(mat.rows) +
                                    "x" + std::to_string(mat.cols));
}

std::vector<double> matrix_col(const Matrix& mat, std::size_t j) {
    std::vector<double> out(mat.rows);
    for (std::size_t i = 0; i < mat.rows; ++i) out[i] = mat(i, j);
    return out;
}

std::vector<double> matrix_row(const Matrix& mat, std::size_t i) {
    std::vector<double> out(mat.cols);
    for (std::size_t j = 0; j < mat.cols; ++j) out[j] = mat(i, j);
    return out;
}

} // namespace

SurfaceGridData::SurfaceGridData(core::KnotVector xk, core::KnotVector yk, Matrix z, Matrix zx,
                                 Matrix zy)
    : x(std::move(xk)), y(std::move(yk)), values(std::move(z)), ddx(std::move(zx)),
      ddy(std::move(zy)) {
    check_shape(values, x.size(), y.size(), "value grid");
    check_shape(ddx, x.size(), y.size(), "x-partial grid");
    check_shape(ddy, x.size(), y.size(), "y-partial grid");
    for (std::size_t i = 0; i < values.rows; ++i)
        for (std::size_t j = 0; j < values.cols; ++j)
            if (!std::isfinite(values(i, j)) || !std::isfinite(ddx(i, j)) ||
                !std::isfinite(ddy(i, j)))
                throw std::invalid_argument("non-finite surface data at " + cell(i, j));
}

SurfaceGridData SurfaceGridData::with_estimated_partials(core::KnotVector xk, core::KnotVector yk,
                                                         Matrix z) {
    auto [zx, zy] = estimate_partials(xk, yk, z);
    return SurfaceGridData(std::move(xk), std::move(yk), std::move(z), std::move(zx),
                           std::move(zy));
}

rq::HermiteCurveData SurfaceGridData::row_section(std::size_t j) const {
    return rq::HermiteCurveData(x, matrix_col(values, j), matrix_col(ddx, j));
}

rq::HermiteCurveData SurfaceGridData::col_section(std::size_t i) const {
    return rq::HermiteCurveData(y, matrix_row(values, i), matrix_row(ddy, i));
}

SurfaceGridData SurfaceGridData::transposed() const {
    Matrix z(values.cols, values.rows), zx(values.cols, values.rows), zy(values.cols, values.rows);
    for (std::size_t i = 0; i < values.rows; ++i)
        for (std::size_t j = 0; j < values.cols; ++j) {
            z(j, i) = values(i, j);
            zx(j, i) = ddy(i, j); // partial roles swap with the axes
            zy(j, i) = ddx(i, j);
        }
    return SurfaceGridData(y, x, std::move(z), std::move(zx), std::move(zy));
}

std::pair<Matrix, Matrix> estimate_partials(const core::KnotVector& x, const core::KnotVector& y,
                                            const Matrix& values) {
    check_shape(values, x.size(), y.size(), "value grid");
    Matrix zx(values.rows, values.cols), zy(values.rows, values.cols);
    for (std::size_t j = 0; j < values.cols; ++j) {
        const std::vector<double> est = rq::estimate_derivatives(x, matrix_col(values, j));
        for (std::size_t i = 0; i < values.rows; ++i) zx(i, j) = est[i];
    }
    for (std::size_t i = 0; i < values.rows; ++i) {
        const std::vector<double> est = rq::estimate_derivatives(y, matrix_row(values, i));
        for (std::size_t j = 0; j < values.cols; ++j) zy(i, j) = est[j];
    }
    return {std::move(zx), std::move(zy)};
}

std::vector<rq::RationalQuarticFIF> boundary_curves_x(const SurfaceGridData& data,
                                                      const XDirectionParams& params) {
    const std::size_t m = data.m(), n = data.n();
    check_shape(params.scaling, m - 1, n, "x-direction scaling");
    check_shape(params.shape, m - 1, n, "x-direction shape");
    for (std::size_t i = 0; i + 1 < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!(std::abs(params.scaling(i, j)) < data.x.ratio(i)))
                throw std::invalid_argument("x-direction scaling at " + cell(i, j) +
                                            " reaches the mesh-ratio cap");

    std::vector<rq::RationalQuarticFIF> curves;
    curves.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
        curves.push_back(rq::assemble_fif(data.row_section(j),
                                          rq::ShapeParams::tension(matrix_col(params.shape, j)),
                                          matrix_col(params.scaling, j)));
    return curves;
}

std::vector<rq::RationalQuarticFIF> boundary_curves_y(const SurfaceGridData& data,
                                                      const YDirectionParams& params) {
    const std::size_t m = data.m(), n = data.n();
    check_shape(params.scaling, m, n - 1, "y-direction scaling");
    check_shape(params.shape, m, n - 1, "y-direction shape");
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j + 1 < n; ++j)
            if (!(std::abs(params.scaling(i, j)) < data.y.ratio(j)))
                throw std::invalid_argument("y-direction scaling at " + cell(i, j) +
                                            " reaches the mesh-ratio cap");

    std::vector<rq::RationalQuarticFIF> curves;
    curves.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
        curves.push_back(rq::assemble_fif(data.col_section(i),
                                          rq::ShapeParams::tension(matrix_row(params.shape, i)),
                                          matrix_row(params.scaling, i)));
    return curves;
}

std::pair<double, double> hermite_blenders(double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw std::domain_error("blender argument " + std::to_string(t) + " outside [0, 1]");
    const double omt = 1.0 - t;
    return {omt * omt * (1.0 + 2.0 * t), t * t * (3.0 - 2.0 * t)};
}

BlendedSurface::BlendedSurface(SurfaceGridData data, std::vector<core::FixedPointTable> row_tables,
                               std::vector<core::FixedPointTable> col_tables,
                               std::size_t resolution)
    : data_(std::move(data)), rows_(std::move(row_tables)), cols_(std::move(col_tables)),
      resolution_(resolution) {
    if (rows_.size() != data_.n() || cols_.size() != data_.m())
        throw std::invalid_argument("boundary table count does not match the grid");
    const std::size_t R = resolution_;
    for (const auto& t : rows_)
        if (t.abscissae.size() != data_.m() - 1 || t.abscissae[0].size() != R + 1)
            throw std::invalid_argument("row table shape does not match the grid and resolution");
    for (const auto& t : cols_)
        if (t.abscissae.size() != data_.n() - 1 || t.abscissae[0].size() != R + 1)
            throw std::invalid_argument("column table shape does not match the grid and resolution");

    lattice_x_.reserve((data_.m() - 1) * R + 1);
    for (std::size_t i = 0; i + 1 < data_.m(); ++i)
        for (std::size_t k = 0; k < R; ++k) lattice_x_.push_back(rows_[0].abscissae[i][k]);
    lattice_x_.push_back(data_.x.back());
    lattice_y_.reserve((data_.n() - 1) * R + 1);
    for (std::size_t j = 0; j + 1 < data_.n(); ++j)
        for (std::size_t l = 0; l < R; ++l) lattice_y_.push_back(cols_[0].abscissae[j][l]);
    lattice_y_.push_back(data_.y.back());
}

double BlendedSurface::patch_value(std::size_t i, std::size_t j, std::size_t k,
                                   std::size_t l) const {
    const double R = static_cast<double>(resolution_);
    const auto [b0x, b1x] = hermite_blenders(static_cast<double>(k) / R);
    const auto [b0y, b1y] = hermite_blenders(static_cast<double>(l) / R);

    const double left = cols_[i].values[j][l];
    const double right = cols_[i + 1].values[j][l];
    const double bottom = rows_[j].values[i][k];
    const double top = rows_[j + 1].values[i][k];

    const double z00 = data_.values(i, j), z01 = data_.values(i, j + 1);
    const double z10 = data_.values(i + 1, j), z11 = data_.values(i + 1, j + 1);

    const double across_x = b0x * left + b1x * right;
    const double across_y = b0y * bottom + b1y * top;
    const double corners = b0x * (b0y * z00 + b1y * z01) + b1x * (b0y * z10 + b1y * z11);
    return across_x + across_y - corners;
}

double BlendedSurface::lattice_value(std::size_t gx, std::size_t gy) const {
    const std::size_t R = resolution_;
    const std::size_t i = std::min(gx / R, data_.m() - 2);
    const std::size_t j = std::min(gy / R, data_.n() - 2);
    return patch_value(i, j, gx - i * R, gy - j * R);
}

SurfaceSamples BlendedSurface::sample_lattice() const {
    SurfaceSamples out;
    out.x = lattice_x_;
    out.y = lattice_y_;
    out.values = Matrix(lattice_x_.size(), lattice_y_.size());
    for (std::size_t gx = 0; gx < lattice_x_.size(); ++gx)
        for (std::size_t gy = 0; gy < lattice_y_.size(); ++gy)
            out.values(gx, gy) = lattice_value(gx, gy);
    return out;
}

BlendedSurface blend_surface(const SurfaceGridData& data, const XDirectionParams& px,
                             const YDirectionParams& py, std::size_t resolution, double tol) {
    std::vector<rq::RationalQuarticFIF> horizontal = boundary_curves_x(data, px);
    std::vector<rq::RationalQuarticFIF> vertical = boundary_curves_y(data, py);

    std::vector<core::FixedPointTable> rows, cols;
    rows.reserve(horizontal.size());
    for (const auto& c : horizontal) rows.push_back(c.sample(resolution, tol));
    cols.reserve(vertical.size());
    for (const auto& c : vertical) cols.push_back(c.sample(resolution, tol));
    return BlendedSurface(data, std::move(rows), std::move(cols), resolution);
}

namespace {

std::size_t locate_lattice(const std::vector<double>& lattice, double v, const char* axis) {
    const auto it = std::lower_bound(lattice.begin(), lattice.end(), v);
    const double span = std::abs(lattice.back() - lattice.front());
    const double tol = 8.0 * std::numeric_limits<double>::epsilon() *
                       std::max(span, std::abs(v));
    double best = std::numeric_limits<double>::infinity();
    std::size_t pick = lattice.size();
    if (it != lattice.end() && std::abs(*it - v) < best) {
        best = std::abs(*it - v);
        pick = static_cast<std::size_t>(it - lattice.begin());
    }
    if (it != lattice.begin() && std::abs(*(it - 1) - v) < best) {
        best = std::abs(*(it - 1) - v);
        pick = static_cast<std::size_t>(it - lattice.begin()) - 1;
    }
    if (pick == lattice.size() || best > tol)
        throw std::domain_error(std::string("off-lattice ") + axis + " query at " +
                                std::to_string(v) +
                                "; the blended surface is exposed on its sample lattice only");
    return pick;
}

} // namespace

double coons_blend(const BlendedSurface& surface, double x, double y) {
    const std::size_t gx = locate_lattice(surface.lattice_x(), x, "x");
    const std::size_t gy = locate_lattice(surface.lattice_y(), y, "y");
    return surface.lattice_value(gx, gy);
}

SurfaceFeasible surface_box_feasible(const SurfaceGridData& data,
                                     const constraints::RectangleConstraint& box) {
    for (std::size_t i = 0; i < data.m(); ++i)
        for (std::size_t j = 0; j < data.n(); ++j)
            if (!(box.lower < data.values(i, j) && data.values(i, j) < box.upper))
                throw std::invalid_argument("box must strictly contain the grid value at " +
                                            cell(i, j));

    SurfaceFeasible out;
    out.rows.reserve(data.n());
    for (std::size_t j = 0; j < data.n(); ++j)
        out.rows.push_back(constraints::rectangle_feasible(data.row_section(j), box));
    out.cols.reserve(data.m());
    for (std::size_t i = 0; i < data.m(); ++i)
        out.cols.push_back(constraints::rectangle_feasible(data.col_section(i), box));
    return out;
}

SurfaceFeasible surface_above_plane_feasible(const SurfaceGridData& data,
                                             const PlaneConstraint& plane) {
    if (plane.a == 0.0 || plane.b == 0.0)
        throw std::invalid_argument("plane intercepts a and b must be nonzero");
    for (std::size_t i = 0; i < data.m(); ++i)
        for (std::size_t j = 0; j < data.n(); ++j)
            if (!(data.values(i, j) > plane.value(data.x[i], data.y[j])))
                throw std::invalid_argument("grid value at " + cell(i, j) +
                                            " does not lie above the plane");

    SurfaceFeasible out;
    out.rows.reserve(data.n());
    for (std::size_t j = 0; j < data.n(); ++j) {
        const constraints::LineConstraint trace{-plane.c / plane.a,
                                                plane.c * (1.0 - data.y[j] / plane.b)};
        out.rows.push_back(constraints::above_line_feasible(data.row_section(j), trace));
    }
    out.cols.reserve(data.m());
    for (std::size_t i = 0; i < data.m(); ++i) {
        const constraints::LineConstraint trace{-plane.c / plane.b,
                                                plane.c * (1.0 - data.x[i] / plane.a)};
        out.cols.push_back(constraints::above_line_feasible(data.col_section(i), trace));
    }
    return out;
}

} // namespace fif::surface
