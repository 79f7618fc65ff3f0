#include "doctest.h"
#include "helpers.hpp"

#include "fif/core_ifs.hpp"
#include "fif/rq_spline.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace fif;

namespace {

// Independent route for P(theta)/Q(theta): Horner on the nu = theta/(1-theta)
// substitution, P/Q = sum p_k nu^k / ((nu+1)^3 (lambda + nu)).
double nu_substitution_value(const rq::RationalQuartic& q, double theta) {
    const double nu = theta / (1.0 - theta);
    const auto& p = q.numerator;
    const double poly = (((p[4] * nu + p[3]) * nu + p[2]) * nu + p[1]) * nu + p[0];
    const double np1 = nu + 1.0;
    return poly / (np1 * np1 * np1 * (q.den_left + nu));
}

rq::HermiteCurveData three_knot_data() {
    return rq::HermiteCurveData(core::KnotVector({0.0, 1.0, 2.0}), {0.0, 1.0, 0.5},
                                {1.0, 1.0, -0.5});
}

// Newton-form interpolating quartic through five samples; the polynomial
// oracle for the lambda = 1 base function.
struct QuarticFit {
    std::array<double, 5> nodes{};
    std::array<double, 5> coef{};

    template <typename F> static QuarticFit through(F&& f, double a, double b) {
        QuarticFit fit;
        for (int i = 0; i < 5; ++i) fit.nodes[i] = a + (b - a) * i / 4.0;
        std::array<double, 5> d{};
        for (int i = 0; i < 5; ++i) d[i] = f(fit.nodes[i]);
        for (int level = 1; level < 5; ++level)
            for (int i = 4; i >= level; --i)
                d[i] = (d[i] - d[i - 1]) / (fit.nodes[i] - fit.nodes[i - level]);
        fit.coef = d;
        return fit;
    }

    double operator()(double x) const {
        double v = coef[4];
        for (int i = 3; i >= 0; --i) v = v * (x - nodes[i]) + coef[i];
        return v;
    }
};

} // namespace

TEST_SUITE_BEGIN("rq_spline");

TEST_CASE("classical quintuple matches hand evaluation") {
    auto data = three_knot_data();
    auto shape = rq::ShapeParams::tension({2.0, 2.0});
    const auto q = rq::classical_coeffs(data, shape, 0);
    // lambda = 2, y = (0, 1), d = (1, 1), h = 1:
    //   (2*0, 7*0 + 2*1*1, 6*1 + 0, 5*1 - 1, 1) = (0, 2, 6, 4, 1).
    CHECK(q.numerator[0] == 0.0);
    CHECK(q.numerator[1] == 2.0);
    CHECK(q.numerator[2] == 6.0);
    CHECK(q.numerator[3] == 4.0);
    CHECK(q.numerator[4] == 1.0);
    CHECK(q.den_left == 2.0);
    CHECK(q.den_right == 1.0);

    const double direct = q(0.5);
    CHECK(direct == doctest::Approx(nu_substitution_value(q, 0.5)).epsilon(1e-14));
}

TEST_CASE("classical form interpolates endpoints and reproduces constants") {
    const double c = 3.25;
    rq::HermiteCurveData data(core::KnotVector({0.0, 1.0, 2.0}), {c, c, c}, {0.0, 0.0, 0.0});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lam_dist(0.05, 20.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double lam = lam_dist(rng);
        auto shape = rq::ShapeParams::tension({lam, lam});
        const auto q = rq::classical_coeffs(data, shape, 0);
        CHECK(q.numerator[0] == doctest::Approx(lam * c));
        CHECK(q.numerator[1] == doctest::Approx((3.0 * lam + 1.0) * c));
        CHECK(q.numerator[2] == doctest::Approx((3.0 * lam + 3.0) * c));
        CHECK(q.numerator[3] == doctest::Approx((lam + 3.0) * c));
        CHECK(q.numerator[4] == doctest::Approx(c));
        for (int i = 0; i <= 20; ++i)
            CHECK(q(i / 20.0) == doctest::Approx(c).epsilon(1e-14));
    }

    auto data2 = three_knot_data();
    auto shape2 = rq::ShapeParams::tension({1.7, 0.4});
    for (std::size_t n = 0; n < 2; ++n) {
        const auto q = rq::classical_coeffs(data2, shape2, n);
        CHECK(q(0.0) == doctest::Approx(data2.values[n]).epsilon(1e-14));
        CHECK(q(1.0) == doctest::Approx(data2.values[n + 1]).epsilon(1e-14));
    }
}

TEST_CASE("index range is checked") {
    auto data = three_knot_data();
    auto shape = rq::ShapeParams::tension({1.0, 1.0});
    CHECK_THROWS_AS(rq::classical_coeffs(data, shape, 2), std::out_of_range);
}

TEST_CASE("base function interpolates the endpoint data") {
    auto data = three_knot_data();
    auto shape = rq::ShapeParams::tension({2.5, 0.8});
    const double w = data.knots.width();
    for (std::size_t n = 0; n < 2; ++n) {
        const auto b = rq::base_function_coeffs(data, shape, n);
        CHECK(b(0.0) == doctest::Approx(data.values.front()).epsilon(1e-14));
        CHECK(b(1.0) == doctest::Approx(data.values.back()).epsilon(1e-14));
        // One-sided difference quotients against the endpoint slopes.
        const double step = 1e-6;
        const double left_slope = (b(step) - b(0.0)) / (step * w);
        const double right_slope = (b(1.0) - b(1.0 - step)) / (step * w);
        CHECK(left_slope == doctest::Approx(data.derivatives.front()).epsilon(1e-4));
        CHECK(right_slope == doctest::Approx(data.derivatives.back()).epsilon(1e-4));
    }
}

TEST_CASE("zero endpoint data collapses the base function") {
    rq::HermiteCurveData data(core::KnotVector({0.0, 1.0, 2.0}), {0.0, 5.0, 0.0},
                              {0.0, 1.0, 0.0});
    const auto b = rq::base_function_coeffs(data, rq::ShapeParams::tension({1.3, 1.3}), 0);
    for (const double coef : b.numerator) CHECK(coef == 0.0);
    for (int i = 0; i <= 10; ++i) CHECK(b(i / 10.0) == 0.0);
}

TEST_CASE("base function with unit tension is a plain quartic") {
    auto data = three_knot_data();
    const auto b = rq::base_function_coeffs(data, rq::ShapeParams::tension({1.0, 1.0}), 0);
    const auto fit = QuarticFit::through([&](double t) { return b(t); }, 0.0, 1.0);
    for (int i = 0; i <= 100; ++i) {
        const double t = i / 100.0;
        CHECK(std::abs(b(t) - fit(t)) < 1e-12);
    }
}

TEST_CASE("scaled quintuple reduces to the classical one at zero scaling") {
    auto data = three_knot_data();
    auto shape = rq::ShapeParams::tension({1.9, 0.6});
    const std::vector<double> zero = {0.0, 0.0};
    for (std::size_t n = 0; n < 2; ++n) {
        const auto classical = rq::classical_coeffs(data, shape, n);
        const auto fractal = rq::fractal_coeffs(data, shape, zero, n);
        for (int i = 0; i < 5; ++i) CHECK(fractal.numerator[i] == classical.numerator[i]);
    }
}

TEST_CASE("scaled quintuple equals classical minus scaling times base") {
    auto data = three_knot_data();
    auto shape = rq::ShapeParams::tension({1.2, 3.0});
    const std::vector<double> alpha = {0.3, -0.25};
    for (std::size_t n = 0; n < 2; ++n) {
        const auto fractal = rq::fractal_coeffs(data, shape, alpha, n);
        const auto classical = rq::classical_coeffs(data, shape, n);
        const auto base = rq::base_function_coeffs(data, shape, n);
        for (int i = 0; i < 5; ++i)
            CHECK(fractal.numerator[i] ==
                  doctest::Approx(classical.numerator[i] - alpha[n] * base.numerator[i])
                      .epsilon(1e-14));
    }
}

TEST_CASE("scaled endpoints carry the matching-condition values") {
    auto data = three_knot_data();
    auto shape = rq::ShapeParams::tension({0.9, 1.4});
    const std::vector<double> alpha = {0.25, 0.4};
    const double y1 = data.values.front(), yN = data.values.back();
    for (std::size_t n = 0; n < 2; ++n) {
        const auto q = rq::fractal_coeffs(data, shape, alpha, n);
        CHECK(q(0.0) == doctest::Approx(data.values[n] - alpha[n] * y1).epsilon(1e-14));
        CHECK(q(1.0) == doctest::Approx(data.values[n + 1] - alpha[n] * yN).epsilon(1e-14));
        CHECK(q.numerator[4] == doctest::Approx(data.values[n + 1] - alpha[n] * yN));
    }
}

TEST_CASE("weighted pair (lambda, 1) matches the one-parameter family") {
    auto data = three_knot_data();
    auto one = rq::ShapeParams::tension({1.8, 0.7});
    auto two = rq::ShapeParams::weighted({1.8, 0.7}, {1.0, 1.0});
    const std::vector<double> alpha = {0.2, -0.3};
    for (std::size_t n = 0; n < 2; ++n) {
        const auto a = rq::fractal_coeffs(data, one, alpha, n);
        const auto b = rq::two_param_coeffs(data, two, alpha, n);
        for (int i = 0; i <= 50; ++i)
            CHECK(a(i / 50.0) == doctest::Approx(b(i / 50.0)).epsilon(1e-14));
    }
}

TEST_CASE("weighted pair is scale invariant") {
    auto data = three_knot_data();
    auto pair = rq::ShapeParams::weighted({2.0, 2.0}, {4.0, 4.0});
    auto ratio = rq::ShapeParams::tension({0.5, 0.5});
    const std::vector<double> alpha = {0.15, 0.35};
    for (std::size_t n = 0; n < 2; ++n) {
        const auto a = rq::two_param_coeffs(data, pair, alpha, n);
        const auto b = rq::fractal_coeffs(data, ratio, alpha, n);
        for (int i = 0; i < 1000; ++i) {
            const double theta = i / 999.0;
            CHECK(std::abs(a(theta) - b(theta)) <= 1e-13);
        }
    }

    // Both weights negative flips numerator and denominator together.
    auto negated = rq::ShapeParams::weighted({-2.0, -2.0}, {-4.0, -4.0});
    const auto c = rq::two_param_coeffs(data, negated, alpha, 0);
    const auto d = rq::two_param_coeffs(data, pair, alpha, 0);
    for (int i = 0; i <= 100; ++i)
        CHECK(c(i / 100.0) == doctest::Approx(d(i / 100.0)).epsilon(1e-13));
}

TEST_CASE("weighted pair with zero scaling interpolates at the knots") {
    auto data = three_knot_data();
    auto pair = rq::ShapeParams::weighted({2.0, 3.0}, {4.0, 1.5});
    auto fif = rq::assemble_fif(data, pair, {0.0, 0.0});
    const auto table = fif.sample(64, 1e-12);
    CHECK(table.values[0][0] == data.values[0]);
    CHECK(table.values[0][64] == data.values[1]);
    CHECK(table.values[1][64] == data.values[2]);
}

TEST_CASE("shape parameter validation") {
    CHECK_THROWS_AS((rq::ShapeParams::tension({1.0, -0.5})), std::invalid_argument);
    CHECK_THROWS_AS((rq::ShapeParams::tension({0.0, 1.0})), std::invalid_argument);
    CHECK_THROWS_AS((rq::ShapeParams::weighted({1.0, 1.0}, {-1.0, 1.0})), std::invalid_argument);
    CHECK_THROWS_AS((rq::ShapeParams::weighted({1.0}, {1.0, 1.0})), std::invalid_argument);
}

TEST_CASE("denominator stays positive for positive tension") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lam_dist(1e-3, 50.0);
    for (int trial = 0; trial < 30; ++trial) {
        const double lam = lam_dist(rng);
        for (int i = 0; i <= 200; ++i) {
            const double theta = i / 200.0;
            CHECK(lam * (1.0 - theta) + theta > 0.0);
        }
    }
}

TEST_CASE("degree-elevated denominator coefficients agree with the linear form") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> lam_dist(1e-3, 100.0);
    for (int trial = 0; trial < 40; ++trial) {
        const double lam = lam_dist(rng);
        const auto cubic = rq::elevated_denominator(lam, 3);
        const auto quartic = rq::elevated_denominator(lam, 4);
        for (int i = 0; i <= 100; ++i) {
            const double t = i / 100.0, o = 1.0 - t;
            const double linear = lam * o + t;
            const double c3 = cubic[0] * o * o * o + cubic[1] * o * o * t + cubic[2] * o * t * t +
                              cubic[3] * t * t * t;
            const double c4 = quartic[0] * o * o * o * o + quartic[1] * o * o * o * t +
                              quartic[2] * o * o * t * t + quartic[3] * o * t * t * t +
                              quartic[4] * t * t * t * t;
            CHECK(std::abs(c3 - linear) <= 1e-13);
            CHECK(std::abs(c4 - linear) <= 1e-13);
        }
    }
}

TEST_CASE("assembly with zero scaling reproduces the classical interpolant") {
    std::mt19937_64 rng(21);
    auto fix = testutil::random_hermite(rng, 5);
    rq::HermiteCurveData data(core::KnotVector(fix.knots), fix.values, fix.derivatives);
    auto shape = rq::ShapeParams::tension(testutil::random_tension(rng, 4));
    auto fif = rq::assemble_fif(data, shape, {0.0, 0.0, 0.0, 0.0});
    const auto table = fif.sample(1000, 1e-12);
    for (const auto& [x, g] : table.merged())
        CHECK(std::abs(g - fif.classical_value(x)) <= 1e-12);
}

TEST_CASE("assembled curve interpolates values and slopes") {
    // Near-unit knot gaps and unit-scale data keep the classical curvature
    // kink at the knots small enough for the difference-quotient budget.
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> gap(0.8, 1.25), val(-1.0, 1.0), der(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t N = 4 + trial % 3;
        std::vector<double> knots(N), y(N), d(N);
        knots[0] = 0.0;
        for (std::size_t i = 1; i < N; ++i) knots[i] = knots[i - 1] + gap(rng);
        for (std::size_t i = 0; i < N; ++i) {
            y[i] = val(rng);
            d[i] = der(rng);
        }
        core::KnotVector kv(knots);
        auto alpha = testutil::random_scaling(rng, kv, 0.05);
        auto shape = rq::ShapeParams::tension(testutil::random_tension(rng, kv.subintervals()));
        auto fif = rq::assemble_fif(rq::HermiteCurveData(kv, y, d), shape, alpha);

        const auto table = fif.sample(50, 1e-11);
        for (std::size_t n = 0; n < kv.subintervals(); ++n) {
            CHECK(table.values[n][0] == y[n]);
            CHECK(table.values[n][50] == y[n + 1]);
        }
        // Centered differences at the interior knots against the slope data.
        const double step = 1e-5;
        for (std::size_t i = 1; i + 1 < kv.size(); ++i) {
            const double up = fif.value_at(kv[i] + step, 60).value;
            const double dn = fif.value_at(kv[i] - step, 60).value;
            CHECK(std::abs((up - dn) / (2.0 * step) - d[i]) <= 1e-4);
        }
    }
}

TEST_CASE("slope estimation is exact for lines and parabolas on uniform grids") {
    core::KnotVector kv({0.0, 1.0, 2.0});
    const auto line = rq::estimate_derivatives(kv, {1.0, 3.0, 5.0});
    for (double d : line) CHECK(d == doctest::Approx(2.0).epsilon(1e-14));

    const auto parab = rq::estimate_derivatives(kv, {0.0, 1.0, 4.0});
    CHECK(parab[0] == doctest::Approx(0.0));
    CHECK(parab[1] == doctest::Approx(2.0));
    CHECK(parab[2] == doctest::Approx(4.0));

    // Symmetric two-subinterval grid: the middle slope averages the chords.
    const auto sym = rq::estimate_derivatives(kv, {1.0, 2.0, 1.0});
    CHECK(sym[1] == doctest::Approx(0.0));
}

TEST_CASE("smoothness-order scaling check") {
    core::KnotVector kv({0.0, 1.0, 2.0});
    CHECK(rq::supports_smoothness_order(kv, std::vector<double>{0.4, 0.4}, 1));
    CHECK_FALSE(rq::supports_smoothness_order(kv, std::vector<double>{0.5, 0.4}, 1));
    CHECK(rq::supports_smoothness_order(kv, std::vector<double>{0.2, 0.2}, 2));
    CHECK_FALSE(rq::supports_smoothness_order(kv, std::vector<double>{0.3, 0.2}, 2));
}

TEST_SUITE_END();
