#include "lecam/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lecam/rng.hpp"

namespace lecam {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Clamps keeping the s -> x maps finite when a quadrature node rounds onto a
// singular endpoint; the truncated tail mass is below 2^-52 of the total.
constexpr double kSHi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
constexpr double kSLo = 1e-300;
}

bool IntervalSpec::finite() const { return std::isfinite(lower) && std::isfinite(upper); }

bool IntervalSpec::contains(double x) const { return x >= lower && x <= upper; }

double IntervalSpec::width() const { return upper - lower; }

// Parameter map s in [0,1] <-> x in I. Families with closed-form quantile
// structure (power law, exponential) use their equal-mass substitution, which
// turns the weight g(x(s)) x'(s) into a constant and absorbs endpoint
// singularities; infinite tails otherwise use x = c + scale * u / (1 - u).
struct BaseMeasure::Cache {
    std::function<double(double)> x_of_s;
    std::function<double(double)> s_of_x;
    std::function<double(double)> dxds;
    ScalarFn weight;  // g(x(s)) * dxds(s)

    std::vector<double> s_edges;
    std::vector<double> cum;  // cumulative mass at s_edges
    double total = 0.0;
    std::vector<double> qtable;  // s at mass fraction i/1024, i = 0..1024

    double cdf_s(double s) const {
        if (s <= 0.0) return 0.0;
        if (s >= 1.0) return total;
        auto it = std::upper_bound(s_edges.begin(), s_edges.end(), s);
        const std::size_t idx = static_cast<std::size_t>(it - s_edges.begin()) - 1;
        const double part = gk15(weight, s_edges[idx], s).value;
        return std::clamp(cum[idx] + part, 0.0, total);
    }

    // Root solve cdf_s(s) = target inside [s_lo, s_hi]: bisection bracket
    // with Newton steps (derivative = weight), refined until the bracket is
    // 1e-12 wide in x (scaled by magnitude on unbounded tails).
    double solve_mass(double target, double s_lo, double s_hi) const {
        double lo = s_lo, hi = s_hi;
        double s = 0.5 * (lo + hi);
        for (int iter = 0; iter < 200; ++iter) {
            const double x_lo = x_of_s(lo), x_hi = x_of_s(hi);
            const double scale =
                std::max(1.0, std::min(std::abs(x_lo), std::abs(x_hi)));
            if (x_hi - x_lo <= 1e-12 * scale || hi - lo < 1e-16) break;
            const double F = cdf_s(s);
            if (F < target)
                lo = s;
            else
                hi = s;
            const double w = weight(s);
            double next = w > 0.0 ? s - (F - target) / w : 0.5 * (lo + hi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            s = next;
        }
        return 0.5 * (x_of_s(lo) + x_of_s(hi));
    }
};

namespace {

std::shared_ptr<const BaseMeasure::Cache> build_cache(
    std::shared_ptr<BaseMeasure::Cache> cache, const QuadratureConfig& quad) {
    auto leaves = integrate_leaves(cache->weight, 0.0, 1.0, quad);
    if (leaves.empty()) throw std::invalid_argument("measure: degenerate support");
    cache->s_edges.reserve(leaves.size() + 1);
    cache->cum.reserve(leaves.size() + 1);
    cache->s_edges.push_back(leaves.front().lo);
    cache->cum.push_back(0.0);
    for (const auto& leaf : leaves) {
        cache->s_edges.push_back(leaf.hi);
        cache->cum.push_back(cache->cum.back() + leaf.value);
    }
    cache->total = cache->cum.back();
    if (!(cache->total > 0.0) || !std::isfinite(cache->total))
        throw std::invalid_argument("measure: total mass must be positive and finite");

    cache->qtable.resize(1025);
    cache->qtable.front() = 0.0;
    cache->qtable.back() = 1.0;
    double s_prev = 0.0;
    for (int i = 1; i < 1024; ++i) {
        const double target = cache->total * static_cast<double>(i) / 1024.0;
        // coarse bracket walk over leaf edges, then the shared solver
        auto it = std::lower_bound(cache->cum.begin(), cache->cum.end(), target);
        const std::size_t idx = static_cast<std::size_t>(it - cache->cum.begin());
        const double hi = cache->s_edges[std::min(idx, cache->s_edges.size() - 1)];
        const double lo = std::max(s_prev, cache->s_edges[idx > 0 ? idx - 1 : 0]);
        double a = lo, b = hi, m = 0.5 * (a + b);
        for (int k = 0; k < 60 && b - a > 1e-13; ++k) {
            if (cache->cdf_s(m) < target)
                a = m;
            else
                b = m;
            const double w = cache->weight(m);
            double next = w > 0.0 ? m - (cache->cdf_s(m) - target) / w : 0.5 * (a + b);
            if (!(next > a && next < b)) next = 0.5 * (a + b);
            m = next;
        }
        cache->qtable[static_cast<std::size_t>(i)] = 0.5 * (a + b);
        s_prev = a;
    }
    return cache;
}

}  // namespace

double BaseMeasure::total_mass() const { return cache_->total; }

double BaseMeasure::cdf(double t) const {
    if (std::isnan(t)) throw std::domain_error("cdf: NaN argument");
    if (t <= interval_.lower) return 0.0;
    if (t >= interval_.upper) return cache_->total;
    return cache_->cdf_s(cache_->s_of_x(t));
}

double BaseMeasure::quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("quantile: p must be in [0,1]");
    return quantile_of_mass(p * cache_->total);
}

double BaseMeasure::quantile_of_mass(double c) const {
    const double total = cache_->total;
    if (std::isnan(c) || c < -1e-9 * total || c > total * (1.0 + 1e-9))
        throw std::domain_error("quantile: mass target outside [0, total_mass]");
    if (c <= 0.0) return interval_.lower;
    if (c >= total) return interval_.upper;
    const auto& qt = cache_->qtable;
    const std::size_t idx =
        std::min<std::size_t>(1023, static_cast<std::size_t>(c / total * 1024.0));
    return cache_->solve_mass(c, qt[idx], qt[idx + 1]);
}

double BaseMeasure::integrate(const ScalarFn& h, double lo, double hi) const {
    lo = std::max(lo, interval_.lower);
    hi = std::min(hi, interval_.upper);
    if (!(lo < hi)) return 0.0;
    const double s_lo = lo <= interval_.lower ? 0.0 : cache_->s_of_x(lo);
    const double s_hi = hi >= interval_.upper ? 1.0 : cache_->s_of_x(hi);
    const auto& c = *cache_;
    return integrate_adaptive([&](double s) { return h(c.x_of_s(s)) * c.weight(s); },
                              std::clamp(s_lo, 0.0, 1.0), std::clamp(s_hi, 0.0, 1.0), quad_)
        .value;
}

double BaseMeasure::integrate(const ScalarFn& h) const {
    return integrate(h, interval_.lower, interval_.upper);
}

double BaseMeasure::integrate_split(const ScalarFn& h,
                                    const std::vector<double>& interior_splits) const {
    std::vector<double> pts;
    pts.push_back(0.0);
    for (double x : interior_splits) {
        if (x > interval_.lower && x < interval_.upper) pts.push_back(cache_->s_of_x(x));
    }
    pts.push_back(1.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const auto& c = *cache_;
    return integrate_with_splits([&](double s) { return h(c.x_of_s(s)) * c.weight(s); }, pts,
                                 quad_)
        .value;
}

double BaseMeasure::integrate_dx(const ScalarFn& h, double lo, double hi) const {
    lo = std::max(lo, interval_.lower);
    hi = std::min(hi, interval_.upper);
    if (!(lo < hi)) return 0.0;
    if (std::isfinite(lo) && std::isfinite(hi))
        return integrate_adaptive(h, lo, hi, quad_).value;
    const double s_lo = lo <= interval_.lower ? 0.0 : cache_->s_of_x(lo);
    const double s_hi = hi >= interval_.upper ? 1.0 : cache_->s_of_x(hi);
    const auto& c = *cache_;
    return integrate_adaptive([&](double s) { return h(c.x_of_s(s)) * c.dxds(s); },
                              std::clamp(s_lo, 0.0, 1.0), std::clamp(s_hi, 0.0, 1.0), quad_)
        .value;
}

BaseMeasure BaseMeasure::uniform(double a, double b) {
    if (!(std::isfinite(a) && std::isfinite(b) && a < b))
        throw std::invalid_argument("uniform measure: need finite a < b");
    BaseMeasure m;
    m.interval_ = {a, b, true, true};
    m.g_ = [](double) { return 1.0; };
    m.family_ = "uniform";
    auto cache = std::make_shared<Cache>();
    const double len = b - a;
    cache->x_of_s = [a, len](double s) { return a + s * len; };
    cache->s_of_x = [a, len](double x) { return (x - a) / len; };
    cache->dxds = [len](double) { return len; };
    cache->weight = [len](double) { return len; };
    m.cache_ = build_cache(std::move(cache), m.quad_);
    return m;
}

BaseMeasure BaseMeasure::power_law(double a, double L) {
    if (!(a > 0.0) || !(L > 0.0) || !std::isfinite(a) || !std::isfinite(L))
        throw std::invalid_argument("power_law measure: need a > 0 and finite L > 0");
    BaseMeasure m;
    m.interval_ = {0.0, L, true, true};
    m.g_ = [a](double x) { return std::pow(x, a - 1.0); };
    m.family_ = "power_law";
    auto cache = std::make_shared<Cache>();
    const double mass = std::pow(L, a) / a;
    cache->x_of_s = [a, L](double s) { return L * std::pow(s, 1.0 / a); };
    cache->s_of_x = [a, L](double x) { return std::pow(std::clamp(x / L, 0.0, 1.0), a); };
    cache->dxds = [a, L](double s) { return (L / a) * std::pow(s, 1.0 / a - 1.0); };
    cache->weight = [mass](double) { return mass; };  // equal-mass substitution
    m.cache_ = build_cache(std::move(cache), m.quad_);
    return m;
}

BaseMeasure BaseMeasure::exponential(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("exponential measure: need lambda > 0");
    BaseMeasure m;
    m.interval_ = {0.0, kInf, true, false};
    m.g_ = [lambda](double x) { return std::exp(-lambda * x); };
    m.family_ = "exponential";
    auto cache = std::make_shared<Cache>();
    cache->x_of_s = [lambda](double s) { return -std::log1p(-std::min(s, kSHi)) / lambda; };
    cache->s_of_x = [lambda](double x) { return -std::expm1(-lambda * x); };
    cache->dxds = [lambda](double s) { return 1.0 / (lambda * (1.0 - std::min(s, kSHi))); };
    cache->weight = [lambda](double) { return 1.0 / lambda; };  // equal-mass substitution
    m.cache_ = build_cache(std::move(cache), m.quad_);
    return m;
}

BaseMeasure BaseMeasure::tabulated(std::vector<double> xs, std::vector<double> gs) {
    if (xs.size() != gs.size() || xs.size() < 2)
        throw std::invalid_argument("tabulated measure: need matching arrays of size >= 2");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (!(xs[i] < xs[i + 1]))
            throw std::invalid_argument("tabulated measure: abscissae must be ascending");
    for (double v : gs)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("tabulated measure: weights must be finite and >= 0");
    auto shared_xs = std::make_shared<std::vector<double>>(std::move(xs));
    auto shared_gs = std::make_shared<std::vector<double>>(std::move(gs));
    IntervalSpec iv{shared_xs->front(), shared_xs->back(), true, true};
    auto g = [shared_xs, shared_gs](double x) {
        const auto& X = *shared_xs;
        const auto& G = *shared_gs;
        if (x <= X.front()) return G.front();
        if (x >= X.back()) return G.back();
        const auto it = std::upper_bound(X.begin(), X.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - X.begin());
        const double t = (x - X[i - 1]) / (X[i] - X[i - 1]);
        return G[i - 1] + t * (G[i] - G[i - 1]);
    };
    return from_density(iv, g, "tabulated");
}

BaseMeasure BaseMeasure::from_density(IntervalSpec interval, std::function<double(double)> g,
                                      std::string family_name, double tail_scale,
                                      QuadratureConfig quad) {
    if (!(interval.lower < interval.upper))
        throw std::invalid_argument("measure: need lower < upper");
    if (!(tail_scale > 0.0)) throw std::invalid_argument("measure: tail_scale must be positive");
    BaseMeasure m;
    m.interval_ = interval;
    m.g_ = std::move(g);
    m.family_ = std::move(family_name);
    m.quad_ = quad;
    auto cache = std::make_shared<Cache>();
    const double lo = interval.lower, hi = interval.upper, sc = tail_scale;
    if (interval.finite()) {
        const double len = hi - lo;
        cache->x_of_s = [lo, len](double s) { return lo + s * len; };
        cache->s_of_x = [lo, len](double x) { return (x - lo) / len; };
        cache->dxds = [len](double) { return len; };
    } else if (std::isfinite(lo)) {
        cache->x_of_s = [lo, sc](double s) {
            s = std::min(s, kSHi);
            return lo + sc * s / (1.0 - s);
        };
        cache->s_of_x = [lo, sc](double x) { return (x - lo) / (sc + (x - lo)); };
        cache->dxds = [sc](double s) {
            s = std::min(s, kSHi);
            return sc / ((1.0 - s) * (1.0 - s));
        };
    } else if (std::isfinite(hi)) {
        cache->x_of_s = [hi, sc](double s) {
            s = std::max(s, kSLo);
            return hi - sc * (1.0 - s) / s;
        };
        cache->s_of_x = [hi, sc](double x) { return sc / (sc + (hi - x)); };
        cache->dxds = [sc](double s) {
            s = std::max(s, kSLo);
            return sc / (s * s);
        };
    } else {
        cache->x_of_s = [sc](double s) {
            s = std::clamp(s, kSLo, kSHi);
            return s < 0.5 ? sc - sc / (2.0 * s) : sc * (2.0 * s - 1.0) / (2.0 * (1.0 - s));
        };
        cache->s_of_x = [sc](double x) {
            return x < 0.0 ? sc / (2.0 * (sc - x)) : 1.0 - sc / (2.0 * (sc + x));
        };
        cache->dxds = [sc](double s) {
            s = std::clamp(s, kSLo, kSHi);
            const double d = s < 0.5 ? s : 1.0 - s;
            return sc / (2.0 * d * d);
        };
    }
    const auto& gx = m.g_;
    auto x_of_s = cache->x_of_s;
    auto dxds = cache->dxds;
    cache->weight = [gx, x_of_s, dxds](double s) {
        const double w = gx(x_of_s(s)) * dxds(s);
        return std::isfinite(w) ? w : 0.0;
    };
    m.cache_ = build_cache(std::move(cache), m.quad_);
    return m;
}

ClassReport check_class_membership(const DensityParameter& f, const BaseMeasure& measure,
                                   std::size_t grid_points) {
    if (grid_points < 8) throw std::invalid_argument("check_class_membership: grid too small");
    ClassReport rep;
    const std::size_t n = grid_points;
    std::vector<double> xs(n), fs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = measure.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
        fs[i] = f.f(xs[i]);
    }
    rep.min_f = *std::min_element(fs.begin(), fs.end());
    rep.max_f = *std::max_element(fs.begin(), fs.end());
    rep.integral_defect = std::abs(measure.integrate(f.f) - 1.0);
    rep.within_bounds = rep.min_f >= f.kappa - 1e-12 && rep.max_f <= f.M + 1e-12;
    if (f.holder) {
        std::vector<double> deriv(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(xs[i]));
            deriv[i] = (f.f(xs[i] + h) - f.f(xs[i] - h)) / (2.0 * h);
        }
        double q = 0.0;
        for (std::size_t stride : {std::size_t{1}, std::size_t{3}, std::size_t{17}}) {
            for (std::size_t i = 0; i + stride < n; i += stride) {
                const double dx = std::abs(xs[i + stride] - xs[i]);
                if (dx <= 0.0) continue;
                q = std::max(q, std::abs(deriv[i + stride] - deriv[i]) /
                                    std::pow(dx, f.holder->gamma));
            }
        }
        rep.holder_quotient = q;
        rep.holder_ok = q <= f.holder->K * (1.0 + 1e-6) + 1e-9;
    }
    return rep;
}

std::vector<double> sample_from_density(const BaseMeasure& measure, const DensityParameter& f,
                                        std::size_t count, std::uint64_t seed) {
    if (!(f.M > 0.0)) throw std::invalid_argument("sample_from_density: M must be positive");
    std::vector<double> out(count);
    const std::size_t max_proposals = 100000;
    for (std::size_t i = 0; i < count; ++i) {
        RngStream stream(derive_key(seed, i));
        std::size_t tries = 0;
        for (;;) {
            if (++tries > max_proposals) {
                const double rate =
                    1.0 / (f.M * measure.total_mass());
                throw std::runtime_error(
                    "sample_from_density: acceptance rate below floor; expected >= " +
                    std::to_string(rate) + " per proposal (f/M envelope too loose)");
            }
            const double x = measure.quantile(stream.next_uniform());
            const double fx = f.f(x);
            if (fx < 0.0 || fx > f.M * (1.0 + 1e-12))
                throw std::runtime_error("sample_from_density: f outside [0, M] envelope at x=" +
                                         std::to_string(x));
            if (stream.next_uniform() * f.M <= fx) {
                out[i] = x;
                break;
            }
        }
    }
    return out;
}

}  // namespace lecam
