#pragma once

/**
 * \file constraints.hpp
 * Sufficient parameter ranges keeping the self-referential rational quartic
 * interpolant inside an ordinate band or above a line, scaling bounds that
 * preserve derivative ranges, and direct validation of the underlying
 * coefficient sign conditions.
 *
 * The ranges are sufficient, not necessary: parameters inside a returned
 * range guarantee the geometric property; parameters outside may still
 * satisfy it.
 */

#include "fif/rq_spline.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fif::constraints {

/// Ordinate band [lower, upper]; must strictly contain the data ordinates.
struct RectangleConstraint {
    double lower = 0.0;
    double upper = 0.0;
};

/// Line t(x) = slope * x + intercept; data must lie strictly above it.
struct LineConstraint {
    double slope = 0.0;
    double intercept = 0.0;

    double value(double x) const { return slope * x + intercept; }
};

void validate(const RectangleConstraint& box, const rq::HermiteCurveData& data);
void validate(const LineConstraint& line, const rq::HermiteCurveData& data);

/// Admissible parameters for one subinterval. The alpha interval is open at
/// both ends except that alpha_min == 0 (above-line case, or a rectangle
/// with no negative-side room) admits alpha = 0 itself.
struct SubintervalRange {
    double alpha_min = 0.0;
    double alpha_max = 0.0;
    /// Shape-parameter lower bound evaluated at alpha_mid; for other alpha
    /// query rectangle_lambda_bound / above_line_lambda_bound.
    double alpha_mid = 0.0;
    double lambda_min = 0.0;
    bool empty = true;

    std::string binding_lower;  ///< condition fixing alpha_min
    std::string binding_upper;  ///< condition fixing alpha_max
    std::string binding_lambda; ///< condition fixing lambda_min
    std::string note;           ///< diagnostics (disconnected set, lambda infeasibility)
};

struct FeasibleRange {
    std::vector<SubintervalRange> sub;

    bool all_feasible() const {
        for (const auto& s : sub)
            if (s.empty) return false;
        return true;
    }
};

/// Shape-parameter lower bound for a chosen scaling factor.
struct LambdaBound {
    double value = 0.0;
    std::string binding = "none";
    /// False when a coefficient inequality fails for every lambda > 0.
    bool feasible = true;
    std::string note;
};

/// Scaling intervals and shape bounds sufficient for the interpolant's graph
/// to stay inside the band. Nonnegative and negative scaling regimes are
/// derived separately from the coefficient sign conditions and merged.
FeasibleRange rectangle_feasible(const rq::HermiteCurveData& data, const RectangleConstraint& box);

LambdaBound rectangle_lambda_bound(const rq::HermiteCurveData& data, const RectangleConstraint& box,
                                   std::size_t n, double alpha);

/// Scaling in [0, alpha_max) and shape bounds sufficient for the graph to
/// stay strictly above the line. Negative scaling is not covered by the
/// sufficient conditions and is excluded.
FeasibleRange above_line_feasible(const rq::HermiteCurveData& data, const LineConstraint& line);

LambdaBound above_line_lambda_bound(const rq::HermiteCurveData& data, const LineConstraint& line,
                                    std::size_t n, double alpha);

/// One evaluated sign condition of the elevated numerator.
struct SignCondition {
    std::string name;
    double value = 0.0;
    bool holds = false;
};

struct SubintervalSignReport {
    std::size_t subinterval = 0;
    std::vector<SignCondition> conditions;
    bool all_hold = true;

    const SignCondition* first_violated() const {
        for (const auto& c : conditions)
            if (!c.holds) return &c;
        return nullptr;
    }
};

/// Evaluates the ten band sign conditions (five per side, >= 0) for the
/// given parameters. Robust to the quotient singularities of the derived
/// thresholds; this is the validator of record.
std::vector<SubintervalSignReport> coefficient_sign_validate(const rq::HermiteCurveData& data,
                                                             const rq::ShapeParams& shape,
                                                             std::span<const double> scaling,
                                                             const RectangleConstraint& box);

/// Evaluates the five above-line sign conditions (strict > 0).
std::vector<SubintervalSignReport> coefficient_sign_validate(const rq::HermiteCurveData& data,
                                                             const rq::ShapeParams& shape,
                                                             std::span<const double> scaling,
                                                             const LineConstraint& line);

/// Extremes of a function over an interval, supplied by the caller.
struct RangeBounds {
    double min = 0.0;
    double max = 0.0;
};

struct AlphaInterval {
    double lower = 0.0;
    double upper = 0.0;

    bool empty() const { return !(lower < upper); }
    bool contains(double a) const { return lower < a && a < upper; }
};

/**
 * Scaling interval under which the perturbed function keeps its r-th
 * derivative inside [band_min, band_max], given the r-th derivative extremes
 * of the germ on the subinterval and of the base function on the whole
 * interval. Always intersected with (-a_n^r, a_n^r).
 */
AlphaInterval derivative_range_scaling(const RangeBounds& germ_on_sub,
                                       const RangeBounds& base_on_interval, double band_min,
                                       double band_max, double mesh_ratio, int r);

/// Per-subinterval form over a whole knot vector.
std::vector<AlphaInterval> derivative_range_scaling(std::span<const RangeBounds> germ_per_sub,
                                                    const RangeBounds& base_on_interval,
                                                    double band_min, double band_max,
                                                    const core::KnotVector& knots, int r);

} // namespace fif::constraints
