#include "fif/rq_spline.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fif::rq {

namespace {

void check_index(std::size_t n, std::size_t subs) {
    if (n >= subs)
        throw std::out_of_range("subinterval index " + std::to_string(n) + " out of range [0, " +
                                std::to_string(subs) + ")");
}

} // namespace

HermiteCurveData::HermiteCurveData(core::KnotVector k, std::vector<double> y,
                                   std::vector<double> d)
    : knots(std::move(k)), values(std::move(y)), derivatives(std::move(d)) {
    if (values.size() != knots.size() || derivatives.size() != knots.size())
        throw std::invalid_argument("values/derivatives must have one entry per knot");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]) || !std::isfinite(derivatives[i]))
            throw std::invalid_argument("non-finite Hermite data at knot " + std::to_string(i));
}

std::vector<double> estimate_derivatives(const core::KnotVector& knots,
                                         const std::vector<double>& values) {
    if (values.size() != knots.size())
        throw std::invalid_argument("values must have one entry per knot");
    const std::size_t N = knots.size();
    std::vector<double> slope(N - 1);
    for (std::size_t n = 0; n + 1 < N; ++n)
        slope[n] = (values[n + 1] - values[n]) / knots.spacing(n);

    std::vector<double> d(N);
    d.front() = slope[0] + (slope[0] - slope[1]) * knots.spacing(0) /
                               (knots.spacing(0) + knots.spacing(1));
    d.back() = slope[N - 2] + (slope[N - 2] - slope[N - 3]) * knots.spacing(N - 2) /
                                  (knots.spacing(N - 2) + knots.spacing(N - 3));
    for (std::size_t i = 1; i + 1 < N; ++i) {
        const double hl = knots.spacing(i - 1), hr = knots.spacing(i);
        d[i] = (hr * slope[i - 1] + hl * slope[i]) / (hl + hr);
    }
    return d;
}

ShapeParams ShapeParams::tension(std::vector<double> lambda) {
    ShapeParams p;
    for (std::size_t n = 0; n < lambda.size(); ++n)
        if (!(lambda[n] > 0.0) || !std::isfinite(lambda[n]))
            throw std::invalid_argument("tension parameter at subinterval " + std::to_string(n) +
                                        " must be positive");
    p.u_ = std::move(lambda);
    p.v_.assign(p.u_.size(), 1.0);
    p.two_param_ = false;
    return p;
}

ShapeParams ShapeParams::weighted(std::vector<double> u, std::vector<double> v) {
    if (u.size() != v.size())
        throw std::invalid_argument("weighted shape parameters need equal-length u and v");
    for (std::size_t n = 0; n < u.size(); ++n)
        if (!(u[n] * v[n] > 0.0))
            throw std::invalid_argument("shape weights at subinterval " + std::to_string(n) +
                                        " must be nonzero with equal signs");
    ShapeParams p;
    p.u_ = std::move(u);
    p.v_ = std::move(v);
    p.two_param_ = true;
    return p;
}

double RationalQuartic::operator()(double theta) const {
    const double omt = 1.0 - theta;
    double num;
    // Horner on the smaller of theta/(1-theta), (1-theta)/theta.
    if (theta <= 0.5) {
        const double s = (omt == 0.0) ? 0.0 : theta / omt;
        num = (((numerator[4] * s + numerator[3]) * s + numerator[2]) * s + numerator[1]) * s +
              numerator[0];
        num *= (omt * omt) * (omt * omt);
    } else {
        const double s = omt / theta;
        num = (((numerator[0] * s + numerator[1]) * s + numerator[2]) * s + numerator[3]) * s +
              numerator[4];
        num *= (theta * theta) * (theta * theta);
    }
    return num / (den_left * omt + den_right * theta);
}

double RationalQuartic::sup_bound() const {
    if (!(den_left * den_right > 0.0)) return std::numeric_limits<double>::infinity();
    // |P| <= max_k |p_k| / C(4,k) since the weighted basis sums to one.
    double m = std::abs(numerator[0]);
    m = std::max(m, std::abs(numerator[1]) / 4.0);
    m = std::max(m, std::abs(numerator[2]) / 6.0);
    m = std::max(m, std::abs(numerator[3]) / 4.0);
    m = std::max(m, std::abs(numerator[4]));
    return m / std::min(std::abs(den_left), std::abs(den_right));
}

RationalQuartic classical_coeffs(const HermiteCurveData& data, const ShapeParams& shape,
                                 std::size_t n) {
    check_index(n, data.knots.subintervals());
    const double lam = shape.lambda(n);
    const double h = data.knots.spacing(n);
    const double yl = data.values[n], yr = data.values[n + 1];
    const double dl = data.derivatives[n], dr = data.derivatives[n + 1];

    RationalQuartic q;
    q.numerator = {lam * yl, (3.0 * lam + 1.0) * yl + lam * h * dl, 3.0 * lam * yr + 3.0 * yl,
                   (lam + 3.0) * yr - h * dr, yr};
    q.den_left = lam;
    q.den_right = 1.0;
    q.convention = ThetaConvention::local_subinterval;
    return q;
}

RationalQuartic base_function_coeffs(const HermiteCurveData& data, const ShapeParams& shape,
                                     std::size_t n) {
    check_index(n, data.knots.subintervals());
    const double lam = shape.lambda(n);
    const double w = data.knots.width();
    const double y1 = data.values.front(), yN = data.values.back();
    const double d1 = data.derivatives.front(), dN = data.derivatives.back();

    RationalQuartic q;
    q.numerator = {lam * y1, (3.0 * lam + 1.0) * y1 + w * lam * d1, 3.0 * lam * yN + 3.0 * y1,
                   (lam + 3.0) * yN - w * dN, yN};
    q.den_left = lam;
    q.den_right = 1.0;
    q.convention = ThetaConvention::global_preimage;
    return q;
}

RationalQuartic fractal_coeffs(const HermiteCurveData& data, const ShapeParams& shape,
                               std::span<const double> scaling, std::size_t n) {
    check_index(n, data.knots.subintervals());
    check_index(n, scaling.size());
    const double a = scaling[n];
    if (std::abs(a) > data.knots.ratio(n))
        throw std::invalid_argument("scaling at subinterval " + std::to_string(n) +
                                    " exceeds the mesh ratio cap");
    const double lam = shape.lambda(n);
    const double h = data.knots.spacing(n), w = data.knots.width();
    const double yl = data.values[n] - a * data.values.front();
    const double yr = data.values[n + 1] - a * data.values.back();
    const double sl = h * data.derivatives[n] - a * w * data.derivatives.front();
    const double sr = h * data.derivatives[n + 1] - a * w * data.derivatives.back();

    RationalQuartic q;
    q.numerator = {lam * yl, lam * sl + (3.0 * lam + 1.0) * yl, 3.0 * yl + 3.0 * lam * yr,
                   (lam + 3.0) * yr - sr, yr};
    q.den_left = lam;
    q.den_right = 1.0;
    q.convention = ThetaConvention::global_preimage;
    return q;
}

RationalQuartic two_param_coeffs(const HermiteCurveData& data, const ShapeParams& shape,
                                 std::span<const double> scaling, std::size_t n) {
    check_index(n, data.knots.subintervals());
    check_index(n, scaling.size());
    if (!shape.two_parameter())
        throw std::invalid_argument("two_param_coeffs requires weighted shape parameters");
    const double a = scaling[n];
    const double u = shape.u(n), v = shape.v(n);
    const double h = data.knots.spacing(n), w = data.knots.width();
    const double yl = data.values[n] - a * data.values.front();
    const double yr = data.values[n + 1] - a * data.values.back();
    const double sl = h * data.derivatives[n] - a * w * data.derivatives.front();
    const double sr = h * data.derivatives[n + 1] - a * w * data.derivatives.back();

    RationalQuartic q;
    q.numerator = {u * yl, u * sl + (3.0 * u + v) * yl, 3.0 * v * yl + 3.0 * u * yr,
                   (u + 3.0 * v) * yr - v * sr, v * yr};
    q.den_left = u;
    q.den_right = v;
    q.convention = ThetaConvention::global_preimage;
    return q;
}

std::vector<double> elevated_denominator(double lambda, int degree) {
    if (degree == 3) return {lambda, 2.0 * lambda + 1.0, lambda + 2.0, 1.0};
    if (degree == 4)
        return {lambda, 3.0 * lambda + 1.0, 3.0 * lambda + 3.0, lambda + 3.0, 1.0};
    throw std::invalid_argument("elevated denominator is defined for degrees 3 and 4");
}

double classical_value(const HermiteCurveData& data, const ShapeParams& shape, double x) {
    if (x < data.knots.front() || x > data.knots.back())
        throw std::domain_error("abscissa outside the knot span");
    const std::size_t n = data.knots.locate(x);
    const double theta = (x - data.knots[n]) / data.knots.spacing(n);
    if (shape.two_parameter()) {
        const std::vector<double> zeros(data.knots.subintervals(), 0.0);
        return two_param_coeffs(data, shape, zeros, n)(theta);
    }
    return classical_coeffs(data, shape, n)(theta);
}

bool supports_smoothness_order(const core::KnotVector& knots, std::span<const double> scaling,
                               int r) {
    if (r < 0) throw std::invalid_argument("smoothness order must be nonnegative");
    if (scaling.size() != knots.subintervals())
        throw std::invalid_argument("scaling count must equal subinterval count");
    for (std::size_t n = 0; n < scaling.size(); ++n)
        if (!(std::abs(scaling[n]) < std::pow(knots.ratio(n), r))) return false;
    return true;
}

RationalQuarticFIF::RationalQuarticFIF(HermiteCurveData data, ShapeParams shape,
                                       std::vector<double> scaling,
                                       std::vector<double> scaling_caps)
    : data_(std::move(data)),
      shape_(std::move(shape)),
      scaling_(std::move(scaling)),
      curve_([&] {
          const std::size_t subs = data_.knots.subintervals();
          if (shape_.size() != subs)
              throw std::invalid_argument("shape parameter count must equal subinterval count");
          if (scaling_.size() != subs)
              throw std::invalid_argument("scaling count must equal subinterval count");

          tables_.reserve(subs);
          base_tables_.reserve(subs);
          for (std::size_t n = 0; n < subs; ++n) {
              tables_.push_back(shape_.two_parameter()
                                    ? two_param_coeffs(data_, shape_, scaling_, n)
                                    : fractal_coeffs(data_, shape_, scaling_, n));
              base_tables_.push_back(base_function_coeffs(data_, shape_, n));
          }

          const double x1 = data_.knots.front();
          const double w = data_.knots.width();
          std::vector<core::LocalMap> qs;
          core::CurveOptions opt;
          opt.scaling_caps = std::move(scaling_caps);
          for (std::size_t n = 0; n < subs; ++n) {
              const RationalQuartic& t = tables_[n];
              qs.push_back([t, x1, w](double x) { return t((x - x1) / w); });
              opt.local_sup_bounds.push_back(t.sup_bound());
          }
          return core::SelfReferentialCurve(data_.knots, data_.values, scaling_, std::move(qs),
                                            std::move(opt));
      }()) {}

RationalQuarticFIF assemble_fif(HermiteCurveData data, ShapeParams shape,
                                std::vector<double> scaling, std::vector<double> scaling_caps) {
    return RationalQuarticFIF(std::move(data), std::move(shape), std::move(scaling),
                              std::move(scaling_caps));
}

} // namespace fif::rq
