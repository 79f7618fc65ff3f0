#include "fif/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fif::constraints {

namespace {

std::string idx(std::size_t n) { return std::to_string(n); }

// Admissible-alpha interval accumulated from linear conditions
// value(alpha) = p + q * alpha >= 0 within a base regime.
struct IntervalBuilder {
    double lo, hi;
    std::string lo_tag, hi_tag;
    bool dead = false;
    std::string dead_tag;

    IntervalBuilder(double base_lo, double base_hi, std::string lot, std::string hit)
        : lo(base_lo), hi(base_hi), lo_tag(std::move(lot)), hi_tag(std::move(hit)) {}

    void require(double p, double q, const std::string& tag) {
        if (dead) return;
        if (q == 0.0) {
            if (p < 0.0) {
                dead = true;
                dead_tag = tag;
            }
            return; // holds for every alpha
        }
        const double bound = -p / q;
        if (q < 0.0) {
            if (bound < hi) {
                hi = bound;
                hi_tag = tag;
            }
        } else {
            if (bound > lo) {
                lo = bound;
                lo_tag = tag;
            }
        }
    }

    bool feasible() const { return !dead && lo < hi; }
};

// Candidate lambda lower bound from a condition lambda * den + num >= 0
// (strict for the above-line case). Quotient guards follow the limits
// lambda -> 0+ and lambda -> infinity.
struct LambdaAccumulator {
    LambdaBound result;

    void add(double num, double den, const std::string& tag, bool strict) {
        if (!result.feasible) return;
        if (den > 0.0) {
            const double cand = -num / den;
            if (cand > result.value) {
                result.value = cand;
                result.binding = tag;
            }
            return;
        }
        const bool at_zero = strict ? (num > 0.0) : (num >= 0.0);
        const bool at_inf = (den == 0.0);
        if (at_zero && at_inf) return; // holds identically
        result.feasible = false;
        result.binding = tag;
        result.note = den < 0.0
                          ? tag + ": coefficient turns negative for large lambda; the admissible "
                                  "shape-parameter set is bounded above and not representable"
                          : tag + ": fails for every lambda";
    }
};

void validate_subinterval(std::size_t n, std::size_t subs) {
    if (n >= subs)
        throw std::out_of_range("subinterval index " + idx(n) + " out of range [0, " + idx(subs) +
                                ")");
}

std::vector<double> line_offsets(const LineConstraint& line, const core::KnotVector& knots) {
    std::vector<double> t(knots.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = line.value(knots[i]);
    return t;
}

} // namespace

void validate(const RectangleConstraint& box, const rq::HermiteCurveData& data) {
    if (!(box.lower < box.upper))
        throw std::invalid_argument("band bounds must satisfy lower < upper");
    std::string bad;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (!(box.lower < data.values[i] && data.values[i] < box.upper))
            bad += (bad.empty() ? "" : ", ") + idx(i);
    if (!bad.empty())
        throw std::invalid_argument("band must strictly contain the data ordinates; violated at "
                                    "knot indices " +
                                    bad);
}

void validate(const LineConstraint& line, const rq::HermiteCurveData& data) {
    std::string bad;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (!(data.values[i] > line.value(data.knots[i])))
            bad += (bad.empty() ? "" : ", ") + idx(i);
    if (!bad.empty())
        throw std::invalid_argument(
            "data must lie strictly above the line; violated at knot indices " + bad);
}

LambdaBound rectangle_lambda_bound(const rq::HermiteCurveData& data,
                                   const RectangleConstraint& box, std::size_t n, double alpha) {
    validate(box, data);
    validate_subinterval(n, data.knots.subintervals());

    const double c = box.lower, d = box.upper;
    const double y1 = data.values.front(), yN = data.values.back();
    const double d1 = data.derivatives.front(), dN = data.derivatives.back();
    const double h = data.knots.spacing(n), w = data.knots.width();

    // Worst-case band images: alpha * y + q(x) stays in [c, d] for y in [c, d]
    // exactly when q stays in [c - alpha * wlo, d - alpha * whi].
    const double wlo = (alpha >= 0.0) ? c : d;
    const double whi = (alpha >= 0.0) ? d : c;

    const double g1 = (data.values[n] - c) - alpha * (y1 - wlo);
    const double g2 = (data.values[n + 1] - c) - alpha * (yN - wlo);
    const double h1 = (d - data.values[n]) - alpha * (whi - y1);
    const double h2 = (d - data.values[n + 1]) - alpha * (whi - yN);
    const double tb = h * data.derivatives[n] - alpha * w * d1;
    const double td = h * data.derivatives[n + 1] - alpha * w * dN;

    LambdaAccumulator acc;
    acc.add(g1, 3.0 * g1 + tb, "B-lower", false);
    // (lambda + 3) * g2 - td >= 0
    if (g2 > 0.0) {
        const double cand = -3.0 + td / g2;
        if (cand > acc.result.value && acc.result.feasible) {
            acc.result.value = cand;
            acc.result.binding = "D-lower";
        }
    } else {
        acc.add(-td, g2, "D-lower", false);
    }
    acc.add(h1, 3.0 * h1 - tb, "B-upper", false);
    if (h2 > 0.0) {
        const double cand = -3.0 - td / h2;
        if (cand > acc.result.value && acc.result.feasible) {
            acc.result.value = cand;
            acc.result.binding = "D-upper";
        }
    } else {
        acc.add(td, h2, "D-upper", false);
    }
    if (acc.result.feasible && acc.result.value == 0.0) acc.result.binding = "none";
    return acc.result;
}

FeasibleRange rectangle_feasible(const rq::HermiteCurveData& data, const RectangleConstraint& box) {
    validate(box, data);
    const std::size_t subs = data.knots.subintervals();
    const double c = box.lower, d = box.upper;
    const double y1 = data.values.front(), yN = data.values.back();
    const double d1 = data.derivatives.front();
    const double w = data.knots.width();

    FeasibleRange out;
    out.sub.resize(subs);
    for (std::size_t n = 0; n < subs; ++n) {
        const double a_n = data.knots.ratio(n);
        const double h = data.knots.spacing(n);
        const double yl = data.values[n], yr = data.values[n + 1];
        const double dl = data.derivatives[n];

        // Nonnegative scaling: band references (c, d). The B-side conditions
        // keep the full tension-threshold denominators nonnegative, the
        // primitive behind the printed slope quotients.
        IntervalBuilder pos(0.0, a_n, "origin", "cap a_n");
        pos.require(yl - c, -(y1 - c), "A-lower");
        pos.require(yr - c, -(yN - c), "E-lower");
        pos.require(3.0 * (yl - c) + h * dl, -(3.0 * (y1 - c) + w * d1), "B-lower-slope");
        pos.require(d - yl, -(d - y1), "A-upper");
        pos.require(d - yr, -(d - yN), "E-upper");
        pos.require(3.0 * (d - yl) - h * dl, -(3.0 * (d - y1) - w * d1), "B-upper-slope");

        // Negative scaling: the band worst cases swap, so the references do too.
        IntervalBuilder neg(-a_n, 0.0, "cap -a_n", "origin");
        neg.require(yl - c, d - y1, "A-lower");
        neg.require(yr - c, d - yN, "E-lower");
        neg.require(3.0 * (yl - c) + h * dl, 3.0 * (d - y1) - w * d1, "B-lower-full");
        neg.require(d - yl, y1 - c, "A-upper");
        neg.require(d - yr, yN - c, "E-upper");
        neg.require(3.0 * (d - yl) - h * dl, 3.0 * (y1 - c) + w * d1, "B-upper-slope");

        SubintervalRange& s = out.sub[n];
        const bool fp = pos.feasible();
        const bool fn = neg.feasible();
        if (fp && fn && pos.lo <= 0.0 && neg.hi >= 0.0) {
            s = {neg.lo, pos.hi, 0.0, 0.0, false, neg.lo_tag, pos.hi_tag, "", ""};
        } else if (fp && fn) {
            if (pos.hi - pos.lo >= neg.hi - neg.lo)
                s = {pos.lo, pos.hi, 0.0, 0.0, false, pos.lo_tag, pos.hi_tag, "", ""};
            else
                s = {neg.lo, neg.hi, 0.0, 0.0, false, neg.lo_tag, neg.hi_tag, "", ""};
            s.note = "feasible scaling set is disconnected; reporting the wider component";
        } else if (fp) {
            s = {pos.lo, pos.hi, 0.0, 0.0, false, pos.lo_tag, pos.hi_tag, "", ""};
        } else if (fn) {
            s = {neg.lo, neg.hi, 0.0, 0.0, false, neg.lo_tag, neg.hi_tag, "", ""};
        } else {
            s.empty = true;
            s.binding_upper = pos.dead ? pos.dead_tag : pos.hi_tag;
            s.binding_lower = neg.dead ? neg.dead_tag : neg.lo_tag;
            s.note = "no scaling factor satisfies the sufficient conditions";
            continue;
        }

        s.alpha_mid = 0.5 * (s.alpha_min + s.alpha_max);
        LambdaBound lb = rectangle_lambda_bound(data, box, n, s.alpha_mid);
        if (!lb.feasible) {
            s.empty = true;
            s.note = lb.note;
            s.binding_lambda = lb.binding;
        } else {
            s.lambda_min = lb.value;
            s.binding_lambda = lb.binding;
        }
    }
    return out;
}

LambdaBound above_line_lambda_bound(const rq::HermiteCurveData& data, const LineConstraint& line,
                                    std::size_t n, double alpha) {
    validate(line, data);
    validate_subinterval(n, data.knots.subintervals());
    if (alpha < 0.0)
        throw std::invalid_argument("above-line conditions require nonnegative scaling");

    const std::vector<double> t = line_offsets(line, data.knots);
    const auto& y = data.values;
    const std::size_t N = y.size();
    const double h = data.knots.spacing(n), w = data.knots.width();
    const double d1 = data.derivatives.front(), dN = data.derivatives.back();

    const double a1 = (y[n] - t[n]) - alpha * (y[0] - t[0]);
    const double e1 = (y[n + 1] - t[n + 1]) - alpha * (y[N - 1] - t[N - 1]);
    const double cden =
        (y[n + 1] - t[n]) - alpha * (y[N - 1] - t[0]) + 2.0 * ((y[n + 1] - t[n + 1]) - alpha * (y[N - 1] - t[N - 1]));
    const double cnum =
        2.0 * ((y[n] - t[n]) - alpha * (y[0] - t[0])) + (y[n] - t[n + 1]) - alpha * (y[0] - t[N - 1]);
    const double l = 2.0 * (y[n] - t[n]) + (y[n] - t[n + 1]) + h * data.derivatives[n] -
                     alpha * (2.0 * (y[0] - t[0]) + (y[0] - t[N - 1]) + w * d1);
    const double m = (y[n + 1] - t[n]) + 2.0 * (y[n + 1] - t[n + 1]) - h * data.derivatives[n + 1] -
                     alpha * ((y[N - 1] - t[0]) + 2.0 * (y[N - 1] - t[N - 1]) - w * dN);

    LambdaAccumulator acc;
    acc.add(cnum, cden, "C*", true);
    acc.add(a1, l, "B*", true);
    acc.add(m, e1, "D*", true);
    if (acc.result.feasible && acc.result.value == 0.0) acc.result.binding = "none";
    return acc.result;
}

FeasibleRange above_line_feasible(const rq::HermiteCurveData& data, const LineConstraint& line) {
    validate(line, data);
    const std::size_t subs = data.knots.subintervals();
    const std::vector<double> t = line_offsets(line, data.knots);
    const auto& y = data.values;
    const std::size_t N = y.size();

    FeasibleRange out;
    out.sub.resize(subs);
    for (std::size_t n = 0; n < subs; ++n) {
        IntervalBuilder pos(0.0, data.knots.ratio(n), "origin", "cap a_n");
        pos.require(y[n] - t[n], -(y[0] - t[0]), "A*");
        pos.require(y[n + 1] - t[n + 1], -(y[N - 1] - t[N - 1]), "E*");
        pos.require((y[n + 1] - t[n]) + 2.0 * (y[n + 1] - t[n + 1]),
                    -((y[N - 1] - t[0]) + 2.0 * (y[N - 1] - t[N - 1])), "C*-slope");

        SubintervalRange& s = out.sub[n];
        if (!pos.feasible()) {
            s.empty = true;
            s.binding_upper = pos.dead ? pos.dead_tag : pos.hi_tag;
            s.binding_lower = pos.lo_tag;
            s.note = "no nonnegative scaling satisfies the sufficient conditions";
            continue;
        }
        s = {pos.lo, pos.hi, 0.0, 0.0, false, pos.lo_tag, pos.hi_tag, "", ""};
        s.alpha_mid = 0.5 * (s.alpha_min + s.alpha_max);
        LambdaBound lb = above_line_lambda_bound(data, line, n, s.alpha_mid);
        if (!lb.feasible) {
            s.empty = true;
            s.note = lb.note;
            s.binding_lambda = lb.binding;
        } else {
            s.lambda_min = lb.value;
            s.binding_lambda = lb.binding;
        }
    }
    return out;
}

std::vector<SubintervalSignReport> coefficient_sign_validate(const rq::HermiteCurveData& data,
                                                             const rq::ShapeParams& shape,
                                                             std::span<const double> scaling,
                                                             const RectangleConstraint& box) {
    validate(box, data);
    const std::size_t subs = data.knots.subintervals();
    if (shape.size() != subs || scaling.size() != subs)
        throw std::invalid_argument("shape/scaling count must equal subinterval count");

    std::vector<SubintervalSignReport> reports(subs);
    for (std::size_t n = 0; n < subs; ++n) {
        const double lam = shape.lambda(n);
        const double alpha = scaling[n];
        const rq::RationalQuartic q = rq::fractal_coeffs(data, shape, scaling, n);
        const auto& p = q.numerator;
        const double lo = box.lower - alpha * ((alpha >= 0.0) ? box.lower : box.upper);
        const double hi = box.upper - alpha * ((alpha >= 0.0) ? box.upper : box.lower);

        // Elevated-denominator weights of the band levels.
        const double e0 = lam, e1 = 3.0 * lam + 1.0, e2 = 3.0 * lam + 3.0, e3 = lam + 3.0,
                     e4 = 1.0;
        SubintervalSignReport& rep = reports[n];
        rep.subinterval = n;
        rep.conditions = {
            {"A-lower", p[0] - lo * e0, false}, {"B-lower", p[1] - lo * e1, false},
            {"C-lower", p[2] - lo * e2, false}, {"D-lower", p[3] - lo * e3, false},
            {"E-lower", p[4] - lo * e4, false}, {"A-upper", hi * e0 - p[0], false},
            {"B-upper", hi * e1 - p[1], false}, {"C-upper", hi * e2 - p[2], false},
            {"D-upper", hi * e3 - p[3], false}, {"E-upper", hi * e4 - p[4], false},
        };
        for (auto& cond : rep.conditions) {
            cond.holds = cond.value >= 0.0;
            rep.all_hold = rep.all_hold && cond.holds;
        }
    }
    return reports;
}

std::vector<SubintervalSignReport> coefficient_sign_validate(const rq::HermiteCurveData& data,
                                                             const rq::ShapeParams& shape,
                                                             std::span<const double> scaling,
                                                             const LineConstraint& line) {
    validate(line, data);
    const std::size_t subs = data.knots.subintervals();
    if (shape.size() != subs || scaling.size() != subs)
        throw std::invalid_argument("shape/scaling count must equal subinterval count");

    const std::vector<double> t = line_offsets(line, data.knots);
    const auto& y = data.values;
    const std::size_t N = y.size();
    const double w = data.knots.width();
    const double d1 = data.derivatives.front(), dN = data.derivatives.back();

    std::vector<SubintervalSignReport> reports(subs);
    for (std::size_t n = 0; n < subs; ++n) {
        const double lam = shape.lambda(n);
        const double alpha = scaling[n];
        const double h = data.knots.spacing(n);

        const double a1 = (y[n] - t[n]) - alpha * (y[0] - t[0]);
        const double e1 = (y[n + 1] - t[n + 1]) - alpha * (y[N - 1] - t[N - 1]);
        const double l = 2.0 * (y[n] - t[n]) + (y[n] - t[n + 1]) + h * data.derivatives[n] -
                         alpha * (2.0 * (y[0] - t[0]) + (y[0] - t[N - 1]) + w * d1);
        const double m = (y[n + 1] - t[n]) + 2.0 * (y[n + 1] - t[n + 1]) -
                         h * data.derivatives[n + 1] -
                         alpha * ((y[N - 1] - t[0]) + 2.0 * (y[N - 1] - t[N - 1]) - w * dN);
        const double cden = (y[n + 1] - t[n]) - alpha * (y[N - 1] - t[0]) +
                            2.0 * ((y[n + 1] - t[n + 1]) - alpha * (y[N - 1] - t[N - 1]));
        const double cnum = 2.0 * ((y[n] - t[n]) - alpha * (y[0] - t[0])) + (y[n] - t[n + 1]) -
                            alpha * (y[0] - t[N - 1]);

        SubintervalSignReport& rep = reports[n];
        rep.subinterval = n;
        rep.conditions = {
            {"A*", lam * a1, false},        {"B*", lam * l + a1, false},
            {"C*", lam * cden + cnum, false}, {"D*", lam * e1 + m, false},
            {"E*", e1, false},
        };
        for (auto& cond : rep.conditions) {
            cond.holds = cond.value > 0.0;
            rep.all_hold = rep.all_hold && cond.holds;
        }
    }
    return reports;
}

AlphaInterval derivative_range_scaling(const RangeBounds& germ_on_sub,
                                       const RangeBounds& base_on_interval, double band_min,
                                       double band_max, double mesh_ratio, int r) {
    if (!(band_min < band_max))
        throw std::invalid_argument("derivative band must satisfy min < max");
    if (!(germ_on_sub.min <= germ_on_sub.max) || !(base_on_interval.min <= base_on_interval.max))
        throw std::invalid_argument("inverted derivative range bounds");
    if (germ_on_sub.min < band_min || germ_on_sub.max > band_max)
        throw std::invalid_argument("germ derivative range must lie inside the band");
    if (!(mesh_ratio > 0.0 && mesh_ratio < 1.0))
        throw std::invalid_argument("mesh ratio must lie in (0, 1)");
    if (r < 1) throw std::invalid_argument("derivative order must be at least 1");

    const double ar = std::pow(mesh_ratio, r);
    const double den_low = base_on_interval.max - band_min; // scale of downward excursions
    const double den_high = band_max - base_on_interval.min;

    double upper = ar, lower = -ar;
    if (den_low > 0.0) {
        upper = std::min(upper, ar * (germ_on_sub.min - band_min) / den_low);
        lower = std::max(lower, -ar * (band_max - germ_on_sub.max) / den_low);
    }
    if (den_high > 0.0) {
        upper = std::min(upper, ar * (band_max - germ_on_sub.max) / den_high);
        lower = std::max(lower, -ar * (germ_on_sub.min - band_min) / den_high);
    }
    return {lower, upper};
}

std::vector<AlphaInterval> derivative_range_scaling(std::span<const RangeBounds> germ_per_sub,
                                                    const RangeBounds& base_on_interval,
                                                    double band_min, double band_max,
                                                    const core::KnotVector& knots, int r) {
    if (germ_per_sub.size() != knots.subintervals())
        throw std::invalid_argument("need one germ range per subinterval");
    std::vector<AlphaInterval> out(germ_per_sub.size());
    for (std::size_t n = 0; n < out.size(); ++n)
        out[n] = derivative_range_scaling(germ_per_sub[n], base_on_interval, band_min, band_max,
                                          knots.ratio(n), r);
    return out;
}

} // namespace fif::constraints
