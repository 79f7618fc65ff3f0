#pragma once

/**
 * \file core_ifs.hpp
 * Interval-partition iterated function systems of the form
 *     w_n(x, y) = (L_n(x), alpha_n * y + q_n(x)),   L_n(x) = a_n x + b_n,
 * and evaluation of the interpolating fixed point of the associated
 * Read-Bajraktarevic operator.
 */

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace fif::core {

/// Affine contraction L(x) = scale * x + offset mapping the base interval
/// onto one subinterval.
struct AffineMap {
    double scale = 0.0;
    double offset = 0.0;

    double operator()(double x) const { return scale * x + offset; }
    double invert(double t) const { return (t - offset) / scale; }
};

/// Strictly increasing interpolation abscissae x_1 < ... < x_N, N >= 3.
class KnotVector {
public:
    explicit KnotVector(std::vector<double> knots);

    std::size_t size() const { return knots_.size(); }
    std::size_t subintervals() const { return knots_.size() - 1; }
    double operator[](std::size_t i) const { return knots_[i]; }
    const std::vector<double>& values() const { return knots_; }

    double front() const { return knots_.front(); }
    double back() const { return knots_.back(); }
    double width() const { return knots_.back() - knots_.front(); }

    double spacing(std::size_t n) const { return knots_[n + 1] - knots_[n]; }
    /// a_n = h_n / (x_N - x_1); sums to 1 across subintervals.
    double ratio(std::size_t n) const { return spacing(n) / width(); }

    /// Index n with x in [x_n, x_{n+1}]; exact knots belong to the
    /// subinterval they open (the last knot belongs to the last one).
    std::size_t locate(double x) const;

    /// Returns the knot index if x equals a knot exactly, npos otherwise.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t exact_knot_index(double x) const;

private:
    std::vector<double> knots_;
};

/// L_n coefficients for every subinterval; L_n(x_1) = x_n, L_n(x_N) = x_{n+1}.
std::vector<AffineMap> build_affine_maps(const KnotVector& knots);

/// Per-subinterval additive term q_n defined on the whole base interval.
using LocalMap = std::function<double(double)>;

/**
 * Immutable self-referential curve: the unique continuous g on [x_1, x_N]
 * with g(L_n(x)) = alpha_n * g(x) + q_n(x) and g(x_i) = y_i.
 *
 * The ordinates must satisfy the matching conditions
 *     alpha_n y_1 + q_n(x_1) = y_n,    alpha_n y_N + q_n(x_N) = y_{n+1}
 * to roundoff; the constructor verifies them.
 *
 * Safe to share across threads once constructed.
 */
struct CurveOptions {
    /// Per-subinterval cap on |alpha_n|; defaults to a_n.
    std::vector<double> scaling_caps;
    /// Upper bounds for sup |q_n| on the base interval. When supplied,
    /// remainder bounds reported by evaluate_exact are rigorous; otherwise
    /// the bounds rest on dense sampling of q_n.
    std::vector<double> local_sup_bounds;
    /// Tolerance for the matching-condition check, relative to data scale.
    double matching_tol = 1e-8;
};

class SelfReferentialCurve {
public:
    SelfReferentialCurve(KnotVector knots, std::vector<double> ordinates,
                         std::vector<double> scaling, std::vector<LocalMap> local_terms,
                         CurveOptions options = CurveOptions());

    const KnotVector& knots() const { return knots_; }
    const std::vector<double>& ordinates() const { return ordinates_; }
    const std::vector<double>& scaling() const { return scaling_; }
    const std::vector<AffineMap>& maps() const { return maps_; }
    double local_term(std::size_t n, double x) const { return local_terms_[n](x); }

    /// max_n |alpha_n|, the RB contraction factor.
    double contraction_factor() const { return contraction_; }

    /// Upper bound for the diameter of the attractor's ordinate range.
    double ordinate_diameter_bound() const { return diameter_bound_; }

    /// Piecewise-linear interpolant of the knot data; the iteration seed.
    double seed_value(double x) const;

private:
    KnotVector knots_;
    std::vector<double> ordinates_;
    std::vector<double> scaling_;
    std::vector<LocalMap> local_terms_;
    std::vector<AffineMap> maps_;
    double contraction_ = 0.0;
    double diameter_bound_ = 0.0;
};

/**
 * Sampled fixed point on a refinement-closed lattice.
 *
 * `pre_abscissae` is a uniform grid u_0..u_R on the base interval and
 * `abscissae[n][k] = L_n(u_k)`, so every map carries sample points to sample
 * points and the functional-equation residual
 *     values[n][k] - alpha_n * pre_values[k] - q_n(u_k)
 * is testable by pure arithmetic.
 */
struct FixedPointTable {
    std::vector<double> pre_abscissae;
    std::vector<double> pre_values;
    std::vector<std::vector<double>> abscissae;
    std::vector<std::vector<double>> values;

    /// Sup distances between successive RB iterates, d_1 .. d_K; after the
    /// first entry each decays by at least the contraction factor.
    std::vector<double> iterate_distances;
    double contraction = 0.0;
    double tolerance = 0.0;

    /// All samples merged, sorted by abscissa with knot duplicates removed.
    std::vector<std::pair<double, double>> merged() const;
};

/**
 * Iterates the RB operator to within `tol` in sup norm and samples the fixed
 * point with `resolution` cells per subinterval.
 *
 * Stops once the successive-iterate distance drops below tol * (1 - r),
 * r = contraction factor, so the returned samples are within tol of the
 * exact fixed point. Throws numerical_error if `max_iterations` is hit.
 */
FixedPointTable rb_fixed_point(const SelfReferentialCurve& curve, std::size_t resolution,
                               double tol, std::size_t max_iterations = 512);

/// Point evaluation with a rigorous error bound.
struct ExactValue {
    double value = 0.0;
    /// (product of |alpha| along the expanded chain) * ordinate diameter bound.
    double remainder_bound = 0.0;
    /// Inverse-map levels actually expanded.
    std::size_t levels = 0;
};

/**
 * Evaluates the fixed point at x by expanding the functional equation through
 * at most `depth` inverse maps. The expansion terminates early (with zero
 * remainder) at exact knots and when the accumulated scaling product hits 0.
 */
ExactValue evaluate_exact(const SelfReferentialCurve& curve, double x, std::size_t depth);

} // namespace fif::core
