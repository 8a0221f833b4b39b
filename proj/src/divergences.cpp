#include "lecam/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lecam/stats.hpp"

namespace lecam {

namespace {

constexpr std::uint64_t kTagMcTv = 0x6d637476ULL;

double bisect_root(const ScalarFn& diff, double lo, double hi, double f_lo) {
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo) + std::abs(hi));
         ++it) {
        double mid = 0.5 * (lo + hi);
        double f_mid = diff(mid);
        if (f_mid == 0.0) {
            return mid;
        }
        if ((f_lo < 0.0) == (f_mid < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

L1HellingerResult l1_and_hellinger(const ScalarFn& p, const ScalarFn& q,
                                   const BaseMeasure& measure,
                                   const std::vector<double>& hint_knots,
                                   double normalization_tol) {
    const IntervalSpec& interval = measure.interval();
    auto integrate_kinked = [&](const ScalarFn& h, double lo, double hi) {
        std::vector<double> edges;
        edges.push_back(lo);
        for (double k : hint_knots) {
            if (k > lo && k < hi) {
                edges.push_back(k);
            }
        }
        std::sort(edges.begin(), edges.end());
        edges.push_back(hi);
        double acc = 0.0;
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            acc += measure.integrate(h, edges[e], edges[e + 1]);
        }
        return acc;
    };

    double total_p = integrate_kinked(p, interval.lower, interval.upper);
    double total_q = integrate_kinked(q, interval.lower, interval.upper);
    if (std::abs(total_p - 1.0) > normalization_tol || std::abs(total_q - 1.0) > normalization_tol) {
        throw std::invalid_argument("l1_and_hellinger: densities integrate to " +
                                    std::to_string(total_p) + " and " + std::to_string(total_q) +
                                    ", expected 1 within tolerance");
    }

    // Locate sign changes of p - q on the mass-quantile grid, then bisect.
    auto diff = [&p, &q](double x) { return p(x) - q(x); };
    constexpr int kGrid = 1024;
    std::vector<double> xs;
    std::vector<double> ds;
    xs.reserve(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        double x = measure.quantile((i + 0.5) / kGrid);
        xs.push_back(x);
        ds.push_back(diff(x));
    }
    for (double k : hint_knots) {
        if (k > xs.front() && k < xs.back()) {
            xs.push_back(k);
            ds.push_back(diff(k));
        }
    }
    {
        std::vector<std::size_t> order(xs.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::sort(order.begin(), order.end(),
                  [&xs](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
        std::vector<double> xs2(xs.size());
        std::vector<double> ds2(ds.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            xs2[i] = xs[order[i]];
            ds2[i] = ds[order[i]];
        }
        xs.swap(xs2);
        ds.swap(ds2);
    }

    // A zero of p - q counts as a crossing only when the sign actually flips
    // across it; runs of exact zeros (e.g. identical densities) are not roots.
    std::vector<double> roots;
    int prev_sign = 0;
    std::size_t prev_idx = 0;
    std::size_t zero_start = xs.size();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ds[i] == 0.0) {
            if (zero_start == xs.size()) zero_start = i;
            continue;
        }
        const int sign = ds[i] < 0.0 ? -1 : 1;
        if (prev_sign != 0 && sign != prev_sign) {
            if (zero_start != xs.size()) {
                roots.push_back(0.5 * (xs[zero_start] + xs[i - 1]));
            } else {
                roots.push_back(bisect_root(diff, xs[prev_idx], xs[i], ds[prev_idx]));
            }
        }
        prev_sign = sign;
        prev_idx = i;
        zero_start = xs.size();
    }
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());

    std::vector<double> edges;
    edges.push_back(interval.lower);
    for (double r : roots) {
        edges.push_back(r);
    }
    edges.push_back(interval.upper);

    double l1 = 0.0;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        l1 += std::abs(integrate_kinked(diff, edges[e], edges[e + 1]));
    }

    auto hell_integrand = [&p, &q](double x) {
        double root_diff = std::sqrt(std::max(0.0, p(x))) - std::sqrt(std::max(0.0, q(x)));
        return root_diff * root_diff;
    };
    double h2 = 0.0;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        h2 += integrate_kinked(hell_integrand, edges[e], edges[e + 1]);
    }
    h2 = std::max(0.0, h2);
    double h = std::sqrt(h2);
    if (0.5 * l1 > h + 1e-10) {
        throw std::runtime_error("l1_and_hellinger: computed L1/2 exceeds H, quadrature failure");
    }

    L1HellingerResult result;
    double tol = measure.quad_config().abs_tol * static_cast<double>(edges.size());
    result.l1 = {l1, DivergenceResult::Method::quadrature, std::nullopt, tol};
    result.hellinger = {h, DivergenceResult::Method::quadrature, std::nullopt, tol};
    result.hellinger_sq = h2;
    result.sign_changes = roots;
    return result;
}

double hellinger_product_bound(const std::vector<double>& per_factor_h2) {
    double sum = 0.0;
    for (double h2 : per_factor_h2) {
        if (!(h2 >= 0.0)) {
            throw std::invalid_argument("hellinger_product_bound: entries must be nonnegative");
        }
        sum += h2;
    }
    return std::sqrt(sum);
}

double hellinger_tensorization_exact(double h2, std::int64_t n) {
    if (!(h2 >= 0.0) || h2 > 2.0 || n < 0) {
        throw std::invalid_argument("hellinger_tensorization_exact: need h2 in [0,2] and n >= 0");
    }
    return 2.0 - 2.0 * std::pow(1.0 - 0.5 * h2, static_cast<double>(n));
}

double gaussian_hellinger_sq(double mu1, double sigma1, double mu2, double sigma2) {
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) {
        throw std::invalid_argument("gaussian_hellinger_sq: sigmas must be positive");
    }
    double v1 = sigma1 * sigma1;
    double v2 = sigma2 * sigma2;
    double d = mu1 - mu2;
    double bc = std::sqrt(2.0 * sigma1 * sigma2 / (v1 + v2)) * std::exp(-d * d / (4.0 * (v1 + v2)));
    return 2.0 - 2.0 * bc;
}

double gaussian_tv_exact(double mu1, double sigma1, double mu2, double sigma2) {
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) {
        throw std::invalid_argument("gaussian_tv_exact: sigmas must be positive");
    }
    if (mu1 == mu2 && sigma1 == sigma2) {
        return 0.0;
    }
    auto cdf1 = [&](double x) { return normal_cdf((x - mu1) / sigma1); };
    auto cdf2 = [&](double x) { return normal_cdf((x - mu2) / sigma2); };

    // log p1 - log p2 = a x^2 + b x + c.
    double a = 1.0 / (2.0 * sigma2 * sigma2) - 1.0 / (2.0 * sigma1 * sigma1);
    double b = mu1 / (sigma1 * sigma1) - mu2 / (sigma2 * sigma2);
    double c = mu2 * mu2 / (2.0 * sigma2 * sigma2) - mu1 * mu1 / (2.0 * sigma1 * sigma1) +
               std::log(sigma2 / sigma1);
    if (a == 0.0) {
        if (b == 0.0) {
            return 0.0;
        }
        double x0 = -c / b;
        return std::abs(cdf1(x0) - cdf2(x0));
    }
    double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) {
        return 0.0;
    }
    double sq = std::sqrt(disc);
    double qq = -0.5 * (b + std::copysign(sq, b == 0.0 ? 1.0 : b));
    double r1 = qq / a;
    double r2 = (qq == 0.0) ? -b / a : c / qq;
    if (r1 > r2) {
        std::swap(r1, r2);
    }
    double d1 = cdf1(r2) - cdf1(r1);
    double d2 = cdf2(r2) - cdf2(r1);
    return std::abs(d1 - d2);
}

double gaussian_tv_bound(double mu1, double sigma1, double mu2, double sigma2) {
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) {
        throw std::invalid_argument("gaussian_tv_bound: sigmas must be positive");
    }
    double ratio = 1.0 - (sigma1 * sigma1) / (sigma2 * sigma2);
    double dm = mu1 - mu2;
    return std::sqrt(2.0 * ratio * ratio + dm * dm / (2.0 * sigma2 * sigma2));
}

double gp_l1_bound(const ScalarFn& h1, const ScalarFn& h2, const ScalarFn& sigma, double lo,
                   double hi, const std::vector<double>& splits, QuadratureConfig quad) {
    auto integrand = [&](double x) {
        double s = sigma(x);
        if (!(s > 0.0)) {
            throw std::domain_error("gp_l1_bound: sigma must be positive on the window");
        }
        double d = h1(x) - h2(x);
        return d * d / (s * s);
    };
    std::vector<double> points{lo};
    for (double s : splits) {
        if (s > lo && s < hi) {
            points.push_back(s);
        }
    }
    points.push_back(hi);
    std::sort(points.begin(), points.end());
    double value = integrate_with_splits(integrand, points, quad).value;
    return std::sqrt(std::max(0.0, value));
}

DivergenceResult tv_monte_carlo_product(const std::vector<ProductFactor>& factors,
                                        std::size_t reps, std::uint64_t seed) {
    if (factors.empty() || reps == 0) {
        throw std::invalid_argument("tv_monte_carlo_product: need factors and reps");
    }
    std::vector<double> terms(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        RngStream stream(derive_key(seed, kTagMcTv, static_cast<std::uint64_t>(i)));
        double log_ratio = 0.0;
        for (const ProductFactor& factor : factors) {
            double x = factor.sample(stream);
            log_ratio += factor.log_q(x) - factor.log_p(x);
        }
        if (std::isnan(log_ratio)) {
            throw std::runtime_error("tv_monte_carlo_product: non-finite log-likelihood ratio");
        }
        terms[i] = (log_ratio >= 0.0) ? 0.0 : -std::expm1(log_ratio);
    }
    SampleSummary summary = summarize(terms);
    DivergenceResult result;
    result.value = summary.mean;
    result.method = DivergenceResult::Method::monte_carlo;
    result.standard_error = summary.mean_se;
    result.tolerance = 3.0 * summary.mean_se;
    return result;
}

}  // namespace lecam
