#include "lecam/stats.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lecam/rng.hpp"

namespace lecam {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double chi_square_tail(double x, double df) {
    if (!(df > 0.0)) throw std::domain_error("chi_square_tail: df must be positive");
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double u = cdf(sample[i]);
        d = std::max(d, u - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - u);
    }
    return d;
}

SampleSummary summarize(const std::vector<double>& xs) {
    SampleSummary s;
    s.count = xs.size();
    if (xs.empty()) return s;
    const double n = static_cast<double>(xs.size());
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) return s;
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - s.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    s.variance = m2 / (n - 1.0);
    m2 /= n;
    m4 /= n;
    s.mean_se = std::sqrt(s.variance / n);
    // var(s^2) ~ (m4 - m2^2) / n
    s.var_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    return s;
}

CovSummary covariance(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("covariance: need paired samples of size >= 2");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double c = 0.0;
    std::vector<double> prods(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        prods[i] = (xs[i] - mx) * (ys[i] - my);
        c += prods[i];
    }
    CovSummary out;
    out.cov = c / (n - 1.0);
    double v = 0.0;
    const double pm = c / n;
    for (double p : prods) v += (p - pm) * (p - pm);
    out.se = std::sqrt(v / n / n);
    return out;
}

std::optional<LinearFit> fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("fit_loglog: need paired samples of size >= 2");
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i]))
            return std::nullopt;
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) return std::nullopt;
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

std::vector<std::vector<double>> latin_hypercube(std::size_t count, std::size_t dims,
                                                 RngStream& stream) {
    std::vector<std::vector<double>> pts(count, std::vector<double>(dims, 0.0));
    std::vector<std::size_t> perm(count);
    for (std::size_t d = 0; d < dims; ++d) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = count; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(stream.next_u64() % i);
            std::swap(perm[i - 1], perm[j]);
        }
        for (std::size_t i = 0; i < count; ++i)
            pts[i][d] = (static_cast<double>(perm[i]) + stream.next_uniform()) /
                        static_cast<double>(count);
    }
    return pts;
}

}  // namespace lecam
