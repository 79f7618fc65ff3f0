#include "fif/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fif::convergence {

double univariate_error_bound(const BoundInputs& in) {
    if (!(in.scaling_sup >= 0.0 && in.scaling_sup < 1.0))
        throw std::invalid_argument("scaling sup must lie in [0, 1)");
    if (!(in.shape_floor > 0.0)) throw std::invalid_argument("shape floor must be positive");
    const double k0 = std::isnan(in.offset_constant) ? in.values_sup : in.offset_constant;
    const double xi = std::isnan(in.xi) ? in.shape_ceil : in.xi;

    const double h = in.mesh;
    const double quartic_term = h * h * h * h / 384.0 * in.fourth_derivative_sup;
    const double mismatch_term = in.derivative_mismatch * h / 4.0;
    const double tension_term = h * xi * in.derivative_pair_sup / (16.0 * in.shape_floor);
    const double scaling_term = in.scaling_sup / (1.0 - in.scaling_sup) *
                                (in.values_sup + h * in.derivatives_sup / 4.0 + k0);
    return quartic_term + mismatch_term + tension_term + scaling_term;
}

SurfaceBoundInputs SurfaceBoundInputs::from_grid(const surface::SurfaceGridData& data) {
    SurfaceBoundInputs in;
    in.width_x = data.x.width();
    in.width_y = data.y.width();
    for (std::size_t i = 0; i + 1 < data.m(); ++i) in.mesh_x = std::max(in.mesh_x, data.x.spacing(i));
    for (std::size_t j = 0; j + 1 < data.n(); ++j) in.mesh_y = std::max(in.mesh_y, data.y.spacing(j));

    for (std::size_t i = 0; i < data.m(); ++i)
        for (std::size_t j = 0; j < data.n(); ++j) {
            in.z_sup = std::max(in.z_sup, std::abs(data.values(i, j)));
            in.zx_sup = std::max(in.zx_sup, std::abs(data.ddx(i, j)));
            in.zy_sup = std::max(in.zy_sup, std::abs(data.ddy(i, j)));
        }
    for (std::size_t j = 0; j < data.n(); ++j) {
        in.z_edge_x_sup = std::max({in.z_edge_x_sup, std::abs(data.values(0, j)),
                                    std::abs(data.values(data.m() - 1, j))});
        in.d_edge_x_sup = std::max({in.d_edge_x_sup, std::abs(data.ddx(0, j)),
                                    std::abs(data.ddx(data.m() - 1, j))});
    }
    for (std::size_t i = 0; i < data.m(); ++i) {
        in.z_edge_y_sup = std::max({in.z_edge_y_sup, std::abs(data.values(i, 0)),
                                    std::abs(data.values(i, data.n() - 1))});
        in.d_edge_y_sup = std::max({in.d_edge_y_sup, std::abs(data.ddy(i, 0)),
                                    std::abs(data.ddy(i, data.n() - 1))});
    }
    return in;
}

double surface_perturbation_bound(const SurfaceBoundInputs& in) {
    if (!(in.mesh_x < in.width_x && in.mesh_y < in.width_y))
        throw std::invalid_argument("mesh must be finer than the domain extents");
    const double y_part = in.mesh_y / (in.width_y - in.mesh_y) *
                          (in.z_sup + in.mesh_y * in.zy_sup / 4.0 + in.z_edge_y_sup +
                           in.width_y * in.d_edge_y_sup / 4.0);
    const double x_part = in.mesh_x / (in.width_x - in.mesh_x) *
                          (in.z_sup + in.mesh_x * in.zx_sup / 4.0 + in.z_edge_x_sup +
                           in.width_x * in.d_edge_x_sup / 4.0);
    return y_part + x_part;
}

namespace {

core::KnotVector uniform_knots(double a, double b, std::size_t subintervals) {
    std::vector<double> knots(subintervals + 1);
    for (std::size_t i = 0; i <= subintervals; ++i)
        knots[i] = a + (b - a) * double(i) / double(subintervals);
    knots.back() = b;
    return core::KnotVector(std::move(knots));
}

void check_study_args(std::size_t initial, std::size_t refinements, double rho,
                      std::size_t resolution) {
    if (initial < 2) throw std::invalid_argument("need at least 2 initial subintervals");
    if (refinements < 1) throw std::invalid_argument("need at least one refinement");
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("scaling policy rho must lie in [0, 1)");
    if (resolution < 2) throw std::invalid_argument("resolution must be at least 2");
}

} // namespace

std::vector<CurveStudyRow> curve_convergence_study(const SmoothCurve& f, double x0, double x1,
                                                   std::size_t initial_subintervals,
                                                   std::size_t refinements, double rho,
                                                   double lambda, std::size_t resolution,
                                                   double tol) {
    check_study_args(initial_subintervals, refinements, rho, resolution);
    if (!(x1 > x0)) throw std::invalid_argument("study interval must have positive width");

    std::vector<CurveStudyRow> rows;
    for (std::size_t level = 0; level <= refinements; ++level) {
        const std::size_t subs = initial_subintervals << level;
        core::KnotVector knots = uniform_knots(x0, x1, subs);

        std::vector<double> values(subs + 1), slopes(subs + 1);
        for (std::size_t i = 0; i <= subs; ++i) {
            values[i] = f.value(knots[i]);
            slopes[i] = f.slope(knots[i]);
        }
        std::vector<double> scaling(subs);
        for (std::size_t n = 0; n < subs; ++n) scaling[n] = rho * knots.ratio(n);

        rq::RationalQuarticFIF fif = rq::assemble_fif(
            rq::HermiteCurveData(knots, values, slopes),
            rq::ShapeParams::tension(std::vector<double>(subs, lambda)), scaling);
        core::FixedPointTable table = fif.sample(resolution, tol);

        double err = 0.0;
        for (const auto& [x, g] : table.merged()) err = std::max(err, std::abs(g - f.value(x)));

        CurveStudyRow row;
        row.knots = subs + 1;
        row.mesh = (x1 - x0) / double(subs);
        row.sup_error = err;
        if (!rows.empty()) row.order = std::log2(rows.back().sup_error / err);
        rows.push_back(row);
    }
    return rows;
}

double extrapolated_order(const std::vector<CurveStudyRow>& rows) {
    std::vector<double> orders;
    for (const auto& r : rows)
        if (!std::isnan(r.order)) orders.push_back(r.order);
    if (orders.empty())
        throw std::invalid_argument("order extrapolation needs at least one refinement");

    double estimate = orders.back();
    if (orders.size() >= 3) {
        const double o1 = orders[orders.size() - 3];
        const double o2 = orders[orders.size() - 2];
        const double o3 = orders.back();
        const double d1 = o2 - o1, d2 = o3 - o2;
        if (d1 != d2) estimate = o3 + d2 * d2 / (d1 - d2);
    }
    return std::round(estimate * 1000.0) / 1000.0;
}

double least_squares_order(const std::vector<CurveStudyRow>& rows) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    for (const auto& r : rows) {
        if (!(r.sup_error > 0.0)) continue;
        const double lx = std::log2(r.mesh), ly = std::log2(r.sup_error);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++count;
    }
    if (count < 2) throw std::invalid_argument("order estimate needs at least two error rows");
    return (double(count) * sxy - sx * sy) / (double(count) * sxx - sx * sx);
}

std::vector<SurfaceStudyRow> surface_convergence_study(const SmoothSurface& f, double x0, double x1,
                                                       double y0, double y1,
                                                       std::size_t initial_subintervals,
                                                       std::size_t refinements, double rho,
                                                       double lambda, std::size_t resolution,
                                                       double tol) {
    check_study_args(initial_subintervals, refinements, rho, resolution);
    if (!(x1 > x0 && y1 > y0)) throw std::invalid_argument("study domain must have positive area");

    std::vector<SurfaceStudyRow> rows;
    for (std::size_t level = 0; level <= refinements; ++level) {
        const std::size_t subs = initial_subintervals << level;
        core::KnotVector xk = uniform_knots(x0, x1, subs);
        core::KnotVector yk = uniform_knots(y0, y1, subs);

        surface::Matrix z(subs + 1, subs + 1), zx(subs + 1, subs + 1), zy(subs + 1, subs + 1);
        for (std::size_t i = 0; i <= subs; ++i)
            for (std::size_t j = 0; j <= subs; ++j) {
                z(i, j) = f.value(xk[i], yk[j]);
                zx(i, j) = f.ddx(xk[i], yk[j]);
                zy(i, j) = f.ddy(xk[i], yk[j]);
            }
        surface::SurfaceGridData data(xk, yk, z, zx, zy);

        surface::XDirectionParams px{surface::Matrix(subs, subs + 1),
                                     surface::Matrix(subs, subs + 1, lambda)};
        surface::YDirectionParams py{surface::Matrix(subs + 1, subs),
                                     surface::Matrix(subs + 1, subs, lambda)};
        for (std::size_t i = 0; i < subs; ++i)
            for (std::size_t j = 0; j <= subs; ++j) px.scaling(i, j) = rho * xk.ratio(i);
        for (std::size_t i = 0; i <= subs; ++i)
            for (std::size_t j = 0; j < subs; ++j) py.scaling(i, j) = rho * yk.ratio(j);

        surface::BlendedSurface blend = surface::blend_surface(data, px, py, resolution, tol);
        surface::XDirectionParams px0{surface::Matrix(subs, subs + 1),
                                      surface::Matrix(subs, subs + 1, lambda)};
        surface::YDirectionParams py0{surface::Matrix(subs + 1, subs),
                                      surface::Matrix(subs + 1, subs, lambda)};
        surface::BlendedSurface classical = surface::blend_surface(data, px0, py0, resolution, tol);

        SurfaceStudyRow row;
        row.grid = subs + 1;
        row.mesh = std::max((x1 - x0), (y1 - y0)) / double(subs);
        for (std::size_t gx = 0; gx < blend.lattice_x().size(); ++gx)
            for (std::size_t gy = 0; gy < blend.lattice_y().size(); ++gy) {
                const double v = blend.lattice_value(gx, gy);
                row.sup_error = std::max(
                    row.sup_error,
                    std::abs(v - f.value(blend.lattice_x()[gx], blend.lattice_y()[gy])));
                row.classical_gap =
                    std::max(row.classical_gap, std::abs(v - classical.lattice_value(gx, gy)));
            }
        row.perturbation_bound = surface_perturbation_bound(SurfaceBoundInputs::from_grid(data));
        rows.push_back(row);
    }
    return rows;
}

} // namespace fif::convergence
