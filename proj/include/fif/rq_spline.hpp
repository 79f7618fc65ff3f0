#pragma once

/**
 * \file rq_spline.hpp
 * Classical rational quartic Hermite interpolant (quartic numerator, linear
 * denominator, free tension parameters) and its self-referential
 * generalization driven by per-subinterval scaling factors.
 */

#include "fif/core_ifs.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace fif::rq {

/// Knots with ordinates and first derivatives.
struct HermiteCurveData {
    core::KnotVector knots;
    std::vector<double> values;
    std::vector<double> derivatives;

    HermiteCurveData(core::KnotVector k, std::vector<double> y, std::vector<double> d);

    std::size_t size() const { return values.size(); }
    /// Chord slope (y_{n+1} - y_n) / h_n.
    double slope(std::size_t n) const {
        return (values[n + 1] - values[n]) / knots.spacing(n);
    }
};

/// Arithmetic-mean slopes: interior knots get the spacing-weighted mean of
/// adjacent chord slopes, endpoints the linear extrapolation of the first
/// two. Exact for data on a line.
std::vector<double> estimate_derivatives(const core::KnotVector& knots,
                                         const std::vector<double>& values);

/// Tension parameters: one lambda_n > 0 per subinterval, or a weighted pair
/// (u_n, v_n), both nonzero with equal signs (equivalent to lambda = u/v up
/// to a common numerator/denominator factor).
class ShapeParams {
public:
    static ShapeParams tension(std::vector<double> lambda);
    static ShapeParams weighted(std::vector<double> u, std::vector<double> v);

    bool two_parameter() const { return two_param_; }
    std::size_t size() const { return u_.size(); }
    double lambda(std::size_t n) const { return u_[n] / v_[n]; }
    double u(std::size_t n) const { return u_[n]; }
    double v(std::size_t n) const { return v_[n]; }

private:
    ShapeParams() = default;
    std::vector<double> u_, v_;
    bool two_param_ = false;
};

/// Which argument a rational piece expects.
enum class ThetaConvention {
    local_subinterval, ///< theta = (x - x_n) / h_n, direct evaluation on I_n
    global_preimage    ///< theta = (x - x_1) / (x_N - x_1), pre-image evaluation
};

/// P(theta) / Q(theta) with
///   P = p0(1-t)^4 + p1(1-t)^3 t + p2(1-t)^2 t^2 + p3(1-t) t^3 + p4 t^4,
///   Q = dl(1-t) + dr t.
struct RationalQuartic {
    std::array<double, 5> numerator{};
    double den_left = 1.0;
    double den_right = 1.0;
    ThetaConvention convention = ThetaConvention::local_subinterval;

    double operator()(double theta) const;
    /// Rigorous bound for sup |P/Q| over theta in [0,1].
    double sup_bound() const;
};

/// Classical quintuple of subinterval n:
/// (lambda y_n, (3 lambda + 1) y_n + lambda h_n d_n, 3 lambda y_{n+1} + 3 y_n,
///  (lambda + 3) y_{n+1} - h_n d_{n+1}, y_{n+1}).
RationalQuartic classical_coeffs(const HermiteCurveData& data, const ShapeParams& shape,
                                 std::size_t n);

/// Base-function quintuple: the analogue of the classical one built from the
/// endpoint data (y_1, y_N, d_1, d_N) on the whole interval.
RationalQuartic base_function_coeffs(const HermiteCurveData& data, const ShapeParams& shape,
                                     std::size_t n);

/// Scaled quintuple of the self-referential form; equals
/// classical - alpha_n * base coefficientwise, and reduces to the classical
/// quintuple at alpha_n = 0.
RationalQuartic fractal_coeffs(const HermiteCurveData& data, const ShapeParams& shape,
                               std::span<const double> scaling, std::size_t n);

/// Weighted-pair variant: numerator and denominator are the one-parameter
/// ones with lambda = u/v scaled through by v.
RationalQuartic two_param_coeffs(const HermiteCurveData& data, const ShapeParams& shape,
                                 std::span<const double> scaling, std::size_t n);

/// Bernstein coefficients of lambda (1-t) + t elevated to degree 3 or 4
/// (basis without binomial weights, matching RationalQuartic::numerator).
std::vector<double> elevated_denominator(double lambda, int degree);

/// Direct (nonrecursive) evaluation of the classical interpolant.
double classical_value(const HermiteCurveData& data, const ShapeParams& shape, double x);

/// True when |alpha_n| < a_n^r for every subinterval, the scaling regime in
/// which the self-referential curve keeps r continuous derivatives.
bool supports_smoothness_order(const core::KnotVector& knots, std::span<const double> scaling,
                               int r);

/**
 * Assembled self-referential rational quartic interpolant: the local terms
 * q_n = (fractal quintuple)/(denominator) wired into a SelfReferentialCurve,
 * with the base-function tables kept alongside.
 */
class RationalQuarticFIF {
public:
    RationalQuarticFIF(HermiteCurveData data, ShapeParams shape, std::vector<double> scaling,
                       std::vector<double> scaling_caps = {});

    const HermiteCurveData& data() const { return data_; }
    const ShapeParams& shape() const { return shape_; }
    const std::vector<double>& scaling() const { return scaling_; }
    const RationalQuartic& local_table(std::size_t n) const { return tables_[n]; }
    const RationalQuartic& base_table(std::size_t n) const { return base_tables_[n]; }
    const core::SelfReferentialCurve& curve() const { return curve_; }

    core::FixedPointTable sample(std::size_t resolution, double tol) const {
        return core::rb_fixed_point(curve_, resolution, tol);
    }
    core::ExactValue value_at(double x, std::size_t depth = 32) const {
        return core::evaluate_exact(curve_, x, depth);
    }
    /// The alpha = 0 germ at x.
    double classical_value(double x) const { return rq::classical_value(data_, shape_, x); }

private:
    HermiteCurveData data_;
    ShapeParams shape_;
    std::vector<double> scaling_;
    std::vector<RationalQuartic> tables_;
    std::vector<RationalQuartic> base_tables_;
    core::SelfReferentialCurve curve_;
};

RationalQuarticFIF assemble_fif(HermiteCurveData data, ShapeParams shape,
                                std::vector<double> scaling,
                                std::vector<double> scaling_caps = {});

} // namespace fif::rq
