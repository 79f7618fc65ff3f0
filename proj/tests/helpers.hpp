#pragma once

// Shared test fixtures and small independent oracles.

#include "fif/core_ifs.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testutil {

// Self-referential curve whose local terms interpolate the matching
// conditions affinely; the classic construction for a plain fractal
// interpolant through (x_i, y_i).
inline fif::core::SelfReferentialCurve affine_curve(std::vector<double> knots,
                                                    std::vector<double> y,
                                                    std::vector<double> alpha) {
    fif::core::KnotVector kv(knots);
    const double x1 = kv.front(), w = kv.width();
    const double y1 = y.front(), yN = y.back();
    std::vector<fif::core::LocalMap> qs;
    for (std::size_t n = 0; n + 1 < y.size(); ++n) {
        const double left = y[n] - alpha[n] * y1;
        const double right = y[n + 1] - alpha[n] * yN;
        qs.push_back([left, right, x1, w](double x) {
            const double t = (x - x1) / w;
            return left * (1.0 - t) + right * t;
        });
    }
    return fif::core::SelfReferentialCurve(std::move(kv), std::move(y), std::move(alpha),
                                           std::move(qs));
}

// Random Hermite fixture on [0, span] with bounded knot-spacing skew.
struct RandomCurve {
    std::vector<double> knots;
    std::vector<double> values;
    std::vector<double> derivatives;
};

inline RandomCurve random_hermite(std::mt19937_64& rng, std::size_t n_knots, double span = 2.0) {
    std::uniform_real_distribution<double> gap(0.5, 2.0);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> der(-2.0, 2.0);

    RandomCurve c;
    c.knots.resize(n_knots);
    c.knots[0] = 0.0;
    for (std::size_t i = 1; i < n_knots; ++i) c.knots[i] = c.knots[i - 1] + gap(rng);
    const double scale = span / c.knots.back();
    for (double& x : c.knots) x *= scale;
    for (std::size_t i = 0; i < n_knots; ++i) {
        c.values.push_back(val(rng));
        c.derivatives.push_back(der(rng));
    }
    return c;
}

// Scaling draw with |alpha_n| <= frac * a_n and random signs.
inline std::vector<double> random_scaling(std::mt19937_64& rng, const fif::core::KnotVector& kv,
                                          double frac, bool allow_negative = true) {
    std::uniform_real_distribution<double> mag(0.0, frac);
    std::bernoulli_distribution flip(0.5);
    std::vector<double> alpha(kv.subintervals());
    for (std::size_t n = 0; n < alpha.size(); ++n) {
        alpha[n] = mag(rng) * kv.ratio(n);
        if (allow_negative && flip(rng)) alpha[n] = -alpha[n];
    }
    return alpha;
}

inline std::vector<double> random_tension(std::mt19937_64& rng, std::size_t count, double lo = 0.5,
                                          double hi = 4.0) {
    std::uniform_real_distribution<double> lam(lo, hi);
    std::vector<double> out(count);
    for (double& l : out) l = lam(rng);
    return out;
}

} // namespace testutil
