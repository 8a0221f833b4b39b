#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lecam/measure.hpp"
#include "lecam/rng.hpp"

namespace lecam {

struct DivergenceResult {
    enum class Method { quadrature, closed_form, monte_carlo };

    double value = 0.0;
    Method method = Method::quadrature;
    std::optional<double> standard_error;
    double tolerance = 0.0;  ///< achieved (quadrature) or requested tolerance
};

/// L1 and Hellinger distances between two densities with respect to the same
/// base measure, plus the located sign changes of p - q.
struct L1HellingerResult {
    DivergenceResult l1;
    DivergenceResult hellinger;
    double hellinger_sq = 0.0;
    std::vector<double> sign_changes;
};

/// Computes L1 = int |p - q| dnu0 by splitting the domain at sign changes of
/// p - q (bisection between quantile-grid brackets) and H from
/// H^2 = int (sqrt p - sqrt q)^2 dnu0. `hint_knots` flags known kinks of the
/// integrands. Both densities must integrate to one within
/// `normalization_tol`; the result honors TV = L1/2 <= H up to 1e-10.
L1HellingerResult l1_and_hellinger(const ScalarFn& p, const ScalarFn& q,
                                   const BaseMeasure& measure,
                                   const std::vector<double>& hint_knots = {},
                                   double normalization_tol = 1e-6);

/// sqrt(sum of per-factor squared Hellinger distances); bounds the Hellinger
/// distance of the product measures from above.
double hellinger_product_bound(const std::vector<double>& per_factor_h2);

/// Exact squared Hellinger distance of an n-fold power of one factor:
/// 2 - 2 (1 - h2/2)^n. Always at most n * h2.
double hellinger_tensorization_exact(double h2, std::int64_t n);

/// Closed-form squared Hellinger distance between two normal laws.
double gaussian_hellinger_sq(double mu1, double sigma1, double mu2, double sigma2);

/// Exact total variation between two normal laws via the crossing points of
/// their densities (a quadratic in x, one root when the sigmas agree).
/// Symmetric in the two distributions.
double gaussian_tv_exact(double mu1, double sigma1, double mu2, double sigma2);

/// The closed-form Gaussian TV upper bound
///   sqrt(2 (1 - sigma1^2/sigma2^2)^2 + (mu1 - mu2)^2 / (2 sigma2^2)),
/// evaluated literally; it is not symmetric in its arguments.
double gaussian_tv_bound(double mu1, double sigma1, double mu2, double sigma2);

/// L1 upper bound between two Gaussian-process laws with drifts h1, h2 and
/// common diffusion sigma on [lo, hi]:
///   sqrt(int (h1 - h2)^2 / sigma^2 dt).
/// Plain Lebesgue quadrature; pass kink locations through `splits`.
double gp_l1_bound(const ScalarFn& h1, const ScalarFn& h2, const ScalarFn& sigma, double lo,
                   double hi, const std::vector<double>& splits = {},
                   QuadratureConfig quad = {});

/// One coordinate of a pair of product measures: a sampler for the P factor
/// and both log densities at a point.
struct ProductFactor {
    std::function<double(RngStream&)> sample;
    ScalarFn log_p;
    ScalarFn log_q;
};

/// Monte Carlo estimate of TV(prod P_i, prod Q_i) using the one-sided
/// identity TV = E_P[(1 - dQ/dP)^+], with the likelihood ratio accumulated in
/// log space. Throws on a non-finite log-likelihood difference.
DivergenceResult tv_monte_carlo_product(const std::vector<ProductFactor>& factors,
                                        std::size_t reps, std::uint64_t seed);

}  // namespace lecam
