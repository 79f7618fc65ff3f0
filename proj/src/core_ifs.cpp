#include "fif/core_ifs.hpp"
#include "fif/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fif::core {

namespace {

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

std::string idx(std::size_t n) { return std::to_string(n); }

} // namespace

KnotVector::KnotVector(std::vector<double> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 3)
        throw std::invalid_argument("knot vector needs at least 3 knots, got " +
                                    idx(knots_.size()));
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
        if (!(knots_[i] < knots_[i + 1]))
            throw std::invalid_argument("knots not strictly increasing at index " + idx(i + 1));
        if (!std::isfinite(knots_[i]) || !std::isfinite(knots_[i + 1]))
            throw std::invalid_argument("non-finite knot at index " + idx(i));
    }
}

std::size_t KnotVector::locate(double x) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    if (it == knots_.begin()) return 0;
    std::size_t n = static_cast<std::size_t>(it - knots_.begin()) - 1;
    return std::min(n, knots_.size() - 2);
}

std::size_t KnotVector::exact_knot_index(double x) const {
    auto it = std::lower_bound(knots_.begin(), knots_.end(), x);
    if (it != knots_.end() && *it == x)
        return static_cast<std::size_t>(it - knots_.begin());
    return npos;
}

std::vector<AffineMap> build_affine_maps(const KnotVector& knots) {
    const double x1 = knots.front(), xN = knots.back(), w = knots.width();
    std::vector<AffineMap> maps(knots.subintervals());
    for (std::size_t n = 0; n < maps.size(); ++n) {
        maps[n].scale = knots.spacing(n) / w;
        maps[n].offset = (xN * knots[n] - x1 * knots[n + 1]) / w;
    }
    return maps;
}

SelfReferentialCurve::SelfReferentialCurve(KnotVector knots, std::vector<double> ordinates,
                                           std::vector<double> scaling,
                                           std::vector<LocalMap> local_terms, CurveOptions options)
    : knots_(std::move(knots)),
      ordinates_(std::move(ordinates)),
      scaling_(std::move(scaling)),
      local_terms_(std::move(local_terms)) {
    const std::size_t N = knots_.size();
    const std::size_t subs = knots_.subintervals();
    if (ordinates_.size() != N)
        throw std::invalid_argument("ordinate count " + idx(ordinates_.size()) +
                                    " does not match knot count " + idx(N));
    if (scaling_.size() != subs || local_terms_.size() != subs)
        throw std::invalid_argument("scaling/local-term count must equal subinterval count " +
                                    idx(subs));

    std::vector<double> caps = std::move(options.scaling_caps);
    if (caps.empty()) {
        caps.resize(subs);
        for (std::size_t n = 0; n < subs; ++n) caps[n] = knots_.ratio(n);
    } else if (caps.size() != subs) {
        throw std::invalid_argument("scaling-cap count must equal subinterval count");
    }
    for (std::size_t n = 0; n < subs; ++n) {
        if (!(caps[n] > 0.0) || caps[n] > knots_.ratio(n) + 1e-15)
            throw std::invalid_argument("scaling cap at subinterval " + idx(n) +
                                        " must lie in (0, a_n]");
        if (std::abs(scaling_[n]) >= caps[n])
            throw std::invalid_argument("|scaling| at subinterval " + idx(n) +
                                        " reaches its cap " + std::to_string(caps[n]));
        contraction_ = std::max(contraction_, std::abs(scaling_[n]));
    }
    if (contraction_ >= 1.0)
        throw std::invalid_argument("scaling magnitudes must stay below 1");

    maps_ = build_affine_maps(knots_);

    // Matching conditions tie the local terms to the ordinates.
    double scale = 1.0;
    for (double y : ordinates_) scale = std::max(scale, std::abs(y));
    const double tol = options.matching_tol * scale;
    for (std::size_t n = 0; n < subs; ++n) {
        const double left = scaling_[n] * ordinates_.front() + local_terms_[n](knots_.front());
        const double right = scaling_[n] * ordinates_.back() + local_terms_[n](knots_.back());
        if (std::abs(left - ordinates_[n]) > tol || std::abs(right - ordinates_[n + 1]) > tol)
            throw std::invalid_argument("matching condition violated at subinterval " + idx(n));
    }

    // Rigorous when sup bounds are supplied, sampled estimate otherwise.
    double mq = 0.0;
    if (!options.local_sup_bounds.empty()) {
        if (options.local_sup_bounds.size() != subs)
            throw std::invalid_argument("local sup-bound count must equal subinterval count");
        for (double b : options.local_sup_bounds) mq = std::max(mq, b);
    } else {
        const std::size_t probes = 257;
        for (std::size_t n = 0; n < subs; ++n) {
            double m = 0.0;
            for (std::size_t k = 0; k < probes; ++k) {
                double x = knots_.front() + knots_.width() * double(k) / double(probes - 1);
                m = std::max(m, std::abs(local_terms_[n](x)));
            }
            mq = std::max(mq, 1.25 * m);
        }
    }
    diameter_bound_ = 2.0 * mq / (1.0 - contraction_);
}

double SelfReferentialCurve::seed_value(double x) const {
    const std::size_t n = knots_.locate(x);
    const double t = (x - knots_[n]) / knots_.spacing(n);
    return ordinates_[n] + t * (ordinates_[n + 1] - ordinates_[n]);
}

namespace {

// Expands the functional equation along the pre-image chain of x and reports
// the iterate values h_depth and h_{depth-1} together with the accumulated
// scaling product. Terminates early at exact knots (iterate values there are
// the stored ordinates) and when the product hits zero.
struct Walk {
    double value = 0.0;       // h_depth(x)
    double prev_value = 0.0;  // h_{depth-1}(x)
    double tail_product = 0.0;
    std::size_t levels = 0;
    bool exact = false; // terminated at a knot or a zero product
};

Walk expand_chain(const SelfReferentialCurve& c, double x, std::size_t depth) {
    const KnotVector& kv = c.knots();
    double sum = 0.0, prod = 1.0;
    double prev_sum = 0.0, prev_prod = 1.0, prev_x = x;
    double xcur = clamp(x, kv.front(), kv.back());

    for (std::size_t level = 0; level < depth; ++level) {
        const std::size_t ki = kv.exact_knot_index(xcur);
        if (ki != KnotVector::npos) {
            // Every iterate from this level on takes the stored ordinate
            // here, so both reported iterates are the exact fixed point.
            Walk w;
            w.value = sum + prod * c.ordinates()[ki];
            w.prev_value = w.value;
            w.tail_product = 0.0;
            w.levels = level;
            w.exact = true;
            return w;
        }
        prev_sum = sum;
        prev_prod = prod;
        prev_x = xcur;

        const std::size_t n = kv.locate(xcur);
        const double xpre = clamp(c.maps()[n].invert(xcur), kv.front(), kv.back());
        sum += prod * c.local_term(n, xpre);
        prod *= c.scaling()[n];
        xcur = xpre;

        if (prod == 0.0) {
            Walk w;
            w.value = sum;
            w.prev_value = (level + 1 == depth) ? prev_sum + prev_prod * c.seed_value(prev_x)
                                                : sum;
            w.tail_product = 0.0;
            w.levels = level + 1;
            w.exact = true;
            return w;
        }
    }

    Walk w;
    w.value = sum + prod * c.seed_value(xcur);
    w.prev_value = (depth == 0) ? w.value : prev_sum + prev_prod * c.seed_value(prev_x);
    w.tail_product = std::abs(prod);
    w.levels = depth;
    w.exact = false;
    return w;
}

// Pre-image chain of a monitor point: |alpha| factors and the first-iterate
// residual |h_1 - h_0| at each chain node.
struct MonitorChain {
    std::vector<double> alpha_abs;
    std::vector<double> residual;
};

MonitorChain monitor_chain(const SelfReferentialCurve& c, double x, std::size_t cap) {
    MonitorChain ch;
    const KnotVector& kv = c.knots();
    double xcur = clamp(x, kv.front(), kv.back());
    for (std::size_t level = 0; level < cap; ++level) {
        if (kv.exact_knot_index(xcur) != KnotVector::npos) break; // h_k exact from here on
        const std::size_t n = kv.locate(xcur);
        const double xpre = clamp(c.maps()[n].invert(xcur), kv.front(), kv.back());
        const double h1 = c.scaling()[n] * c.seed_value(xpre) + c.local_term(n, xpre);
        ch.alpha_abs.push_back(std::abs(c.scaling()[n]));
        ch.residual.push_back(std::abs(h1 - c.seed_value(xcur)));
        xcur = xpre;
    }
    return ch;
}

} // namespace

FixedPointTable rb_fixed_point(const SelfReferentialCurve& curve, std::size_t resolution,
                               double tol, std::size_t max_iterations) {
    if (resolution < 2) throw std::invalid_argument("resolution must be at least 2");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

    const KnotVector& kv = curve.knots();
    const std::size_t subs = kv.subintervals();
    const std::size_t R = resolution;
    const double r = curve.contraction_factor();

    FixedPointTable table;
    table.contraction = r;
    table.tolerance = tol;

    table.pre_abscissae.resize(R + 1);
    for (std::size_t k = 0; k <= R; ++k)
        table.pre_abscissae[k] = kv.front() + kv.width() * double(k) / double(R);
    table.pre_abscissae.back() = kv.back();

    // Distances between successive iterates, recorded over the pre-image
    // chains of a monitor subset. Restricting to complete chains keeps the
    // contraction-factor decay exact at the recorded level.
    const std::size_t stride = std::max<std::size_t>(1, (R + 1) / 128);
    std::vector<MonitorChain> chains;
    for (std::size_t k = 0; k <= R; k += stride)
        chains.push_back(monitor_chain(curve, table.pre_abscissae[k], max_iterations + 1));

    const double target = tol * (1.0 - r);
    std::size_t iterations = 0;

    std::vector<std::vector<double>> window(chains.size());
    for (std::size_t c = 0; c < chains.size(); ++c)
        window[c].assign(chains[c].residual.size(), 1.0);

    double d1 = 0.0;
    for (std::size_t k = 1; k <= max_iterations; ++k) {
        double dk = 0.0;
        for (std::size_t c = 0; c < chains.size(); ++c) {
            const auto& ch = chains[c];
            const std::size_t len = ch.residual.size();
            if (len + 1 <= k) continue;
            for (std::size_t j = 0; j + k <= len; ++j)
                dk = std::max(dk, window[c][j] * ch.residual[j + k - 1]);
        }
        table.iterate_distances.push_back(dk);
        if (k == 1) d1 = dk;
        iterations = k;
        if (dk <= target || r == 0.0) break; // zero scaling: the first iterate is the fixed point
        if (k == max_iterations)
            throw numerical_error("RB iteration did not converge within " +
                                      std::to_string(max_iterations) +
                                      " iterations; last distance " + std::to_string(dk),
                                  dk);
        for (std::size_t c = 0; c < chains.size(); ++c) {
            auto& w = window[c];
            const auto& a = chains[c].alpha_abs;
            for (std::size_t j = 0; j + 1 < w.size(); ++j) w[j] = a[j] * w[j + 1];
            if (!w.empty()) w.back() = 0.0; // window ran off the chain
        }
    }

    // A-priori floor on the expansion depth, independent of monitor fidelity.
    std::size_t K = iterations;
    if (r > 0.0 && d1 > 0.0) {
        const double need = tol * (1.0 - r) / (2.0 * d1);
        std::size_t floor_k = 1;
        double p = r;
        while (p > need && floor_k < max_iterations) {
            p *= r;
            ++floor_k;
        }
        K = std::max(K, floor_k);
    }

    // Values of h_K on the pre-image grid (h_{K-1} alongside, so image values
    // are exact one-level compositions).
    std::vector<double> hk(R + 1), hk1(R + 1);
    for (std::size_t k = 0; k <= R; ++k) {
        Walk w = expand_chain(curve, table.pre_abscissae[k], K);
        hk[k] = w.value;
        hk1[k] = w.prev_value;
    }

    table.pre_values = hk;
    for (std::size_t k = 0; k <= R; ++k) {
        const std::size_t ki = kv.exact_knot_index(table.pre_abscissae[k]);
        if (ki != KnotVector::npos) table.pre_values[k] = curve.ordinates()[ki];
    }

    table.abscissae.assign(subs, std::vector<double>(R + 1));
    table.values.assign(subs, std::vector<double>(R + 1));
    for (std::size_t n = 0; n < subs; ++n) {
        const AffineMap& L = curve.maps()[n];
        for (std::size_t k = 0; k <= R; ++k) {
            table.abscissae[n][k] = L(table.pre_abscissae[k]);
            table.values[n][k] =
                curve.scaling()[n] * hk1[k] + curve.local_term(n, table.pre_abscissae[k]);
        }
        table.abscissae[n][0] = kv[n];
        table.abscissae[n][R] = kv[n + 1];
        table.values[n][0] = curve.ordinates()[n];
        table.values[n][R] = curve.ordinates()[n + 1];
    }
    return table;
}

std::vector<std::pair<double, double>> FixedPointTable::merged() const {
    std::vector<std::pair<double, double>> out;
    for (std::size_t n = 0; n < abscissae.size(); ++n) {
        const std::size_t first = (n == 0) ? 0 : 1; // shared knot already emitted
        for (std::size_t k = first; k < abscissae[n].size(); ++k)
            out.emplace_back(abscissae[n][k], values[n][k]);
    }
    return out;
}

ExactValue evaluate_exact(const SelfReferentialCurve& curve, double x, std::size_t depth) {
    const KnotVector& kv = curve.knots();
    if (x < kv.front() || x > kv.back())
        throw std::domain_error("abscissa " + std::to_string(x) + " outside [" +
                                std::to_string(kv.front()) + ", " + std::to_string(kv.back()) +
                                "]");
    if (depth < 1) throw std::invalid_argument("depth must be at least 1");

    Walk w = expand_chain(curve, x, depth);
    ExactValue out;
    out.value = w.value;
    out.remainder_bound = w.exact ? 0.0 : w.tail_product * curve.ordinate_diameter_bound();
    out.levels = w.levels;
    return out;
}

} // namespace fif::core
