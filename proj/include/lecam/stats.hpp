#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace lecam {

class RngStream;

double normal_cdf(double x);
double normal_quantile(double p);

/// Upper tail P(X > x) for X ~ chi-square with df degrees of freedom.
double chi_square_tail(double x, double df);

/// Two-sided Kolmogorov-Smirnov statistic of a sample against `cdf`.
/// The sample is copied and sorted internally.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

struct SampleSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;   // unbiased
    double mean_se = 0.0;    // standard error of the mean
    double var_se = 0.0;     // moment-based standard error of the variance
};

SampleSummary summarize(const std::vector<double>& xs);

/// Sample covariance of paired observations with a moment-based standard
/// error for the estimate.
struct CovSummary {
    double cov = 0.0;
    double se = 0.0;
};

CovSummary covariance(const std::vector<double>& xs, const std::vector<double>& ys);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least squares on (log x, log y). Empty result marks a degenerate column
/// (any non-finite or non-positive value).
std::optional<LinearFit> fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys);

/// Latin hypercube sample: `count` points in [0,1)^dims, one stratum per
/// point and axis, shuffled per axis.
std::vector<std::vector<double>> latin_hypercube(std::size_t count, std::size_t dims,
                                                 RngStream& stream);

}  // namespace lecam
