#include "doctest.h"
#include "helpers.hpp"

#include "fif/constraints.hpp"
#include "fif/core_ifs.hpp"
#include "fif/rq_spline.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace fif;

namespace {

// Symmetric peak fixture: y = (1, 2, 1) on (0, 1, 2); the arithmetic-mean
// slopes are (2, 0, -2).
rq::HermiteCurveData peak_data() {
    core::KnotVector kv({0.0, 1.0, 2.0});
    std::vector<double> y = {1.0, 2.0, 1.0};
    return rq::HermiteCurveData(kv, y, rq::estimate_derivatives(kv, y));
}

// Draws (alpha, lambda) inside a feasible range and checks the sampled curve
// against the predicate on a dense per-subinterval lattice.
template <typename Pred>
void check_sampled(const rq::HermiteCurveData& data, const std::vector<double>& alpha,
                   const std::vector<double>& lambda, std::size_t resolution, Pred&& ok) {
    auto fif = rq::assemble_fif(data, rq::ShapeParams::tension(lambda), alpha);
    const auto table = fif.sample(resolution, 1e-10);
    for (std::size_t n = 0; n < table.abscissae.size(); ++n)
        for (std::size_t k = 0; k < table.abscissae[n].size(); ++k)
            CHECK(ok(table.abscissae[n][k], table.values[n][k]));
}

} // namespace

TEST_SUITE_BEGIN("constraints");

TEST_CASE("band feasibility on the peak fixture matches hand evaluation") {
    auto data = peak_data();
    constraints::RectangleConstraint box{0.0, 3.0};
    const auto fr = constraints::rectangle_feasible(data, box);
    REQUIRE(fr.sub.size() == 2);

    // Subinterval 0 by hand: nonneg side min{a_0, 1/1, 2/1, 2/4, 2/2, 1/2,
    // 4/2} = 0.5 (the cap); negative side max{-a_0, -1/2, -1, -1/2, -2, -1,
    // -4/7} = -0.5 (the cap). Tension bound at the midpoint is vacuous.
    CHECK(fr.sub[0].alpha_min == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(fr.sub[0].alpha_max == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(fr.sub[0].lambda_min == 0.0);
    CHECK_FALSE(fr.sub[0].empty);
    CHECK(fr.sub[0].binding_upper == "cap a_n");

    const auto lb = constraints::rectangle_lambda_bound(data, box, 0, 0.25);
    CHECK(lb.feasible);
    CHECK(lb.value == 0.0);
}

TEST_CASE("loose boxes stop constraining") {
    auto data = peak_data();
    const auto fr =
        constraints::rectangle_feasible(data, constraints::RectangleConstraint{-1e6, 1e6});
    for (const auto& s : fr.sub) {
        CHECK(s.alpha_min == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(s.alpha_max == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(s.lambda_min == 0.0);
    }
}

TEST_CASE("box invariant violations are rejected with indices") {
    auto data = peak_data();
    CHECK_THROWS_WITH_AS(
        constraints::rectangle_feasible(data, constraints::RectangleConstraint{1.0, 3.0}),
        doctest::Contains("indices 0"), std::invalid_argument);
    CHECK_THROWS_AS(
        constraints::rectangle_feasible(data, constraints::RectangleConstraint{3.0, 0.0}),
        std::invalid_argument);
}

TEST_CASE("sampled curves honor the band for in-range draws") {
    std::mt19937_64 rng(31);
    auto data = peak_data();
    constraints::RectangleConstraint box{0.0, 3.0};
    const auto fr = constraints::rectangle_feasible(data, box);

    std::uniform_real_distribution<double> frac(0.02, 0.98);
    std::uniform_real_distribution<double> lam_margin(0.05, 2.0);
    for (int draw = 0; draw < 50; ++draw) {
        std::vector<double> alpha(2), lambda(2);
        for (std::size_t n = 0; n < 2; ++n) {
            const auto& s = fr.sub[n];
            alpha[n] = s.alpha_min + frac(rng) * (s.alpha_max - s.alpha_min);
            const auto lb = constraints::rectangle_lambda_bound(data, box, n, alpha[n]);
            REQUIRE(lb.feasible);
            lambda[n] = std::max(lb.value, 0.0) * (1.0 + lam_margin(rng)) + lam_margin(rng);
        }
        check_sampled(data, alpha, lambda, 200, [&](double, double v) {
            return v >= box.lower - 1e-9 && v <= box.upper + 1e-9;
        });
    }
}

TEST_CASE("band monotonicity: enlarging the box never shrinks the ranges") {
    auto data = peak_data();
    const constraints::RectangleConstraint tight{0.5, 2.5};
    const constraints::RectangleConstraint mid{0.0, 3.0};
    const constraints::RectangleConstraint wide{-5.0, 8.0};
    const auto ft = constraints::rectangle_feasible(data, tight);
    const auto fm = constraints::rectangle_feasible(data, mid);
    const auto fw = constraints::rectangle_feasible(data, wide);
    for (std::size_t n = 0; n < 2; ++n) {
        CHECK(fm.sub[n].alpha_min <= ft.sub[n].alpha_min + 1e-14);
        CHECK(fm.sub[n].alpha_max >= ft.sub[n].alpha_max - 1e-14);
        CHECK(fw.sub[n].alpha_min <= fm.sub[n].alpha_min + 1e-14);
        CHECK(fw.sub[n].alpha_max >= fm.sub[n].alpha_max - 1e-14);

        const double a = 0.5 * (ft.sub[n].alpha_min + ft.sub[n].alpha_max);
        const double bt = constraints::rectangle_lambda_bound(data, tight, n, a).value;
        const double bm = constraints::rectangle_lambda_bound(data, mid, n, a).value;
        const double bw = constraints::rectangle_lambda_bound(data, wide, n, a).value;
        CHECK(bm <= bt + 1e-14);
        CHECK(bw <= bm + 1e-14);
    }
}

TEST_CASE("the two scaling regimes agree near zero") {
    auto data = peak_data();
    constraints::RectangleConstraint box{0.2, 3.5};
    for (std::size_t n = 0; n < 2; ++n) {
        const auto pos = constraints::rectangle_lambda_bound(data, box, n, 1e-12);
        const auto neg = constraints::rectangle_lambda_bound(data, box, n, -1e-12);
        CHECK(pos.feasible == neg.feasible);
        CHECK(pos.value == doctest::Approx(neg.value).epsilon(1e-6));
    }
}

TEST_CASE("above-line feasibility matches hand evaluation") {
    core::KnotVector kv({0.0, 1.0, 2.0});
    rq::HermiteCurveData data(kv, {1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});
    constraints::LineConstraint line{0.0, 0.0};
    const auto fr = constraints::above_line_feasible(data, line);
    REQUIRE(fr.sub.size() == 2);

    // Subinterval 0: min{a_0 = 0.5, 1/1, 2/3, (2+4)/(3+6)} = 0.5;
    // all tension thresholds are negative at the midpoint.
    CHECK(fr.sub[0].alpha_min == 0.0);
    CHECK(fr.sub[0].alpha_max == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(fr.sub[0].lambda_min == 0.0);

    const auto lb = constraints::above_line_lambda_bound(data, line, 0, 0.25);
    CHECK(lb.feasible);
    CHECK(lb.value == 0.0);

    // Subinterval 1: min{0.5, 2/1, 3/3, (3+6)/(3+6)} = 0.5.
    CHECK(fr.sub[1].alpha_max == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("surplus collapse shrinks the range monotonically") {
    core::KnotVector kv({0.0, 1.0, 2.0});
    double previous = 1.0;
    for (const double eps : {0.1, 0.01, 0.001}) {
        rq::HermiteCurveData data(kv, {1.0, eps, 1.0}, {0.0, 0.0, 0.0});
        const auto fr = constraints::above_line_feasible(data, constraints::LineConstraint{});
        CHECK(fr.sub[0].alpha_max <= eps + 1e-15);
        CHECK(fr.sub[0].alpha_max < previous);
        previous = fr.sub[0].alpha_max;
    }
}

TEST_CASE("sampled curves stay above the line for in-range draws") {
    std::mt19937_64 rng(37);
    core::KnotVector kv({0.0, 1.5, 2.5, 4.0});
    std::vector<double> y = {2.0, 1.2, 3.0, 2.5};
    rq::HermiteCurveData data(kv, y, rq::estimate_derivatives(kv, y));
    constraints::LineConstraint line{0.25, 0.1};
    constraints::validate(line, data);
    const auto fr = constraints::above_line_feasible(data, line);
    REQUIRE(fr.all_feasible());

    std::uniform_real_distribution<double> frac(0.02, 0.98);
    std::uniform_real_distribution<double> lam_margin(0.05, 2.0);
    for (int draw = 0; draw < 50; ++draw) {
        std::vector<double> alpha(3), lambda(3);
        for (std::size_t n = 0; n < 3; ++n) {
            alpha[n] = frac(rng) * fr.sub[n].alpha_max;
            const auto lb = constraints::above_line_lambda_bound(data, line, n, alpha[n]);
            REQUIRE(lb.feasible);
            lambda[n] = std::max(lb.value, 0.0) * (1.0 + lam_margin(rng)) + lam_margin(rng);
        }
        check_sampled(data, alpha, lambda, 200, [&](double x, double v) {
            return v > line.value(x) - 1e-9;
        });
    }
}

TEST_CASE("line invariant violations are rejected") {
    core::KnotVector kv({0.0, 1.0, 2.0});
    rq::HermiteCurveData data(kv, {1.0, 0.5, 1.0}, {0.0, 0.0, 0.0});
    CHECK_THROWS_WITH_AS(
        constraints::above_line_feasible(data, constraints::LineConstraint{0.0, 0.5}),
        doctest::Contains("indices 1"), std::invalid_argument);
}

TEST_CASE("upper-bounded tension sets are reported, never clamped") {
    // A strongly negative left slope makes the B* coefficient of lambda
    // negative at the midpoint scaling, so no lower bound exists.
    core::KnotVector kv({0.0, 1.0, 2.0});
    rq::HermiteCurveData data(kv, {1.0, 1.0, 1.0}, {-10.0, 0.0, 0.0});
    const auto fr = constraints::above_line_feasible(data, constraints::LineConstraint{});
    CHECK(fr.sub[0].empty);
    CHECK(fr.sub[0].binding_lambda == "B*");
    CHECK_FALSE(fr.sub[0].note.empty());
    CHECK_FALSE(fr.all_feasible());
}

TEST_CASE("sign validator passes in-range draws and is consistent with feasibility") {
    std::mt19937_64 rng(41);
    auto data = peak_data();
    constraints::RectangleConstraint box{0.0, 3.0};
    const auto fr = constraints::rectangle_feasible(data, box);

    std::uniform_real_distribution<double> frac(0.05, 0.95);
    for (int draw = 0; draw < 20; ++draw) {
        std::vector<double> alpha(2), lambda(2);
        for (std::size_t n = 0; n < 2; ++n) {
            alpha[n] = fr.sub[n].alpha_min +
                       frac(rng) * (fr.sub[n].alpha_max - fr.sub[n].alpha_min);
            lambda[n] =
                std::max(constraints::rectangle_lambda_bound(data, box, n, alpha[n]).value, 0.0) +
                0.5;
        }
        const auto reports = coefficient_sign_validate(data, rq::ShapeParams::tension(lambda),
                                                       alpha, box);
        for (const auto& rep : reports) {
            CHECK(rep.all_hold);
            CHECK(rep.conditions.size() == 10);
        }
    }
}

TEST_CASE("sign validator names the violated condition at a boundary probe") {
    core::KnotVector kv({0.0, 1.0, 2.0});
    std::vector<double> y = {2.0, 1.0, 2.0};
    rq::HermiteCurveData data(kv, y, rq::estimate_derivatives(kv, y));
    constraints::RectangleConstraint box{0.99, 2.01};

    const std::vector<double> alpha = {0.5, 0.5}; // the cap itself, outside the open range
    const auto reports = coefficient_sign_validate(data, rq::ShapeParams::tension({1.0, 1.0}),
                                                   alpha, box);
    CHECK_FALSE(reports[0].all_hold);
    REQUIRE(reports[0].first_violated() != nullptr);
    CHECK(reports[0].first_violated()->name == "E-lower");
}

TEST_CASE("sign validator requires a strict box") {
    core::KnotVector kv({0.0, 1.0, 2.0});
    std::vector<double> y = {2.0, 1.0, 2.0};
    rq::HermiteCurveData data(kv, y, rq::estimate_derivatives(kv, y));
    CHECK_THROWS_AS(coefficient_sign_validate(data, rq::ShapeParams::tension({1.0, 1.0}),
                                              std::vector<double>{0.0, 0.0},
                                              constraints::RectangleConstraint{1.0, 3.0}),
                    std::invalid_argument);
}

TEST_CASE("line-case validator checks strict positivity") {
    core::KnotVector kv({0.0, 1.0, 2.0});
    rq::HermiteCurveData data(kv, {1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});
    const auto good = coefficient_sign_validate(data, rq::ShapeParams::tension({1.0, 1.0}),
                                                std::vector<double>{0.1, 0.1},
                                                constraints::LineConstraint{});
    for (const auto& rep : good) {
        CHECK(rep.all_hold);
        CHECK(rep.conditions.size() == 5);
    }

    // Scaling above the E* quotient (0.2 here) drives that coefficient
    // negative.
    rq::HermiteCurveData dip(kv, {1.0, 0.2, 1.0}, {0.0, 0.0, 0.0});
    const auto bad = coefficient_sign_validate(dip, rq::ShapeParams::tension({1.0, 1.0}),
                                               std::vector<double>{0.45, 0.1},
                                               constraints::LineConstraint{});
    CHECK_FALSE(bad[0].all_hold);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("derivative_range");

TEST_CASE("scaling envelope matches hand evaluation") {
    const auto iv = constraints::derivative_range_scaling({0.25, 0.75}, {0.1, 0.9}, 0.0, 1.0,
                                                          0.5, 1);
    CHECK(iv.lower == doctest::Approx(-5.0 / 36.0).epsilon(1e-14));
    CHECK(iv.upper == doctest::Approx(5.0 / 36.0).epsilon(1e-14));
    CHECK_FALSE(iv.empty());
}

TEST_CASE("constant derivatives degenerate to the full cap interval") {
    const auto iv = constraints::derivative_range_scaling({0.5, 0.5}, {0.5, 0.5}, 0.0, 1.0,
                                                          0.4, 1);
    CHECK(iv.lower == doctest::Approx(-0.4).epsilon(1e-14));
    CHECK(iv.upper == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("per-subinterval scaling envelopes follow the mesh ratios") {
    core::KnotVector kv({0.0, 0.5, 2.0});
    const std::vector<constraints::RangeBounds> germs = {{0.25, 0.75}, {0.25, 0.75}};
    const auto ivs = constraints::derivative_range_scaling(germs, {0.1, 0.9}, 0.0, 1.0, kv, 1);
    REQUIRE(ivs.size() == 2);
    CHECK(ivs[0].upper == doctest::Approx(0.25 * 5.0 / 18.0).epsilon(1e-14));
    CHECK(ivs[1].upper == doctest::Approx(0.75 * 5.0 / 18.0).epsilon(1e-14));
    CHECK_THROWS_AS((constraints::derivative_range_scaling(
                        std::span<const constraints::RangeBounds>(germs.data(), 1), {0.1, 0.9},
                        0.0, 1.0, kv, 1)),
                    std::invalid_argument);
}

TEST_CASE("invalid bounds are rejected") {
    CHECK_THROWS_AS(
        (constraints::derivative_range_scaling({0.5, 0.4}, {0.0, 1.0}, 0.0, 1.0, 0.5, 1)),
        std::invalid_argument);
    CHECK_THROWS_AS(
        (constraints::derivative_range_scaling({0.5, 0.5}, {0.0, 1.0}, 1.0, 0.0, 0.5, 1)),
        std::invalid_argument);
    CHECK_THROWS_AS(
        (constraints::derivative_range_scaling({-0.5, 0.5}, {0.0, 1.0}, 0.0, 1.0, 0.5, 1)),
        std::invalid_argument);
}

TEST_CASE("in-range scaling preserves the derivative band") {
    // Germ f with f' in [0.3, 0.7]; base function matching f and f' at the
    // interval ends with a controlled derivative wiggle.
    const auto f = [](double x) { return 0.2 * x * x + 0.3 * x; };
    const auto fp = [](double x) { return 0.4 * x + 0.3; };
    const auto bp = [&](double x) { return fp(x) + 0.5 * x * (1.0 - x) * (1.0 - 2.0 * x); };
    const auto b = [&](double x) {
        const double wiggle = x * x / 2.0 - x * x * x + x * x * x * x / 2.0;
        return f(x) + 0.5 * wiggle;
    };
    const double band_lo = 0.0, band_hi = 1.0;

    core::KnotVector kv({0.0, 0.4, 1.0});
    std::vector<double> base_probe;
    for (int i = 0; i <= 512; ++i) base_probe.push_back(bp(i / 512.0));
    const double base_min = *std::min_element(base_probe.begin(), base_probe.end());
    const double base_max = *std::max_element(base_probe.begin(), base_probe.end());

    std::vector<double> alpha(2), beta(2);
    for (std::size_t n = 0; n < 2; ++n) {
        const double a_n = kv.ratio(n);
        const auto iv = constraints::derivative_range_scaling(
            {fp(kv[n]), fp(kv[n + 1])}, {base_min, base_max}, band_lo, band_hi, a_n, 1);
        REQUIRE_FALSE(iv.empty());
        alpha[n] = 0.9 * std::min(iv.upper, a_n * a_n); // keeps the slope curve inside its own cap
        beta[n] = alpha[n] / a_n;
        CHECK(iv.contains(alpha[n]));
    }

    // The slope of the perturbed function is itself self-referential with
    // scaling alpha/a and local terms f'(L_n(x)) - (alpha/a) b'(x).
    const auto maps = core::build_affine_maps(kv);
    std::vector<core::LocalMap> slope_terms;
    for (std::size_t n = 0; n < 2; ++n) {
        const auto L = maps[n];
        const double bn = beta[n];
        slope_terms.push_back([=](double x) { return fp(L(x)) - bn * bp(x); });
    }
    core::SelfReferentialCurve slope_curve(kv, {fp(0.0), fp(0.4), fp(1.0)}, beta,
                                           std::move(slope_terms));
    const auto table = core::rb_fixed_point(slope_curve, 512, 1e-10);
    for (std::size_t n = 0; n < 2; ++n)
        for (double v : table.values[n]) {
            CHECK(v >= band_lo - 1e-8);
            CHECK(v <= band_hi + 1e-8);
        }

    // Difference quotients of the value curve sit inside the band as well.
    std::vector<core::LocalMap> value_terms;
    for (std::size_t n = 0; n < 2; ++n) {
        const auto L = maps[n];
        const double an = alpha[n];
        value_terms.push_back([=](double x) { return f(L(x)) - an * b(x); });
    }
    core::SelfReferentialCurve value_curve(kv, {f(0.0), f(0.4), f(1.0)}, alpha,
                                           std::move(value_terms));
    const auto vt = core::rb_fixed_point(value_curve, 512, 1e-12);
    for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t k = 0; k + 1 <= 512; ++k) {
            const double dq = (vt.values[n][k + 1] - vt.values[n][k]) /
                              (vt.abscissae[n][k + 1] - vt.abscissae[n][k]);
            CHECK(dq >= band_lo - 1e-6);
            CHECK(dq <= band_hi + 1e-6);
        }
}

TEST_SUITE_END();
