#pragma once

#include <vector>

#include "lecam/partition.hpp"

namespace lecam {

/// Continuous piecewise-linear function: linear between knots, constant
/// beyond the outermost knots out to the interval endpoints, zero outside
/// the interval closure.
struct PiecewiseLinearDensity {
    std::vector<double> knots;
    std::vector<double> values;
    IntervalSpec interval;

    double operator()(double x) const;
};

/// Hat system u_1..u_m over the partition barycenters. Interior elements are
/// triangles peaking at u_j(x_j*) = m / nu0(I); the first and last elements
/// stay flat at the peak from the interval endpoint to their barycenter.
/// The peak height makes mu * sum_j u_j a partition of unity on I.
class HatBasis {
public:
    explicit HatBasis(QuantilePartition partition);

    int size() const { return part_.m; }
    double peak() const { return peak_; }
    const QuantilePartition& partition() const { return part_; }
    const BaseMeasure& measure() const { return part_.measure; }

    double value(int j, double x) const;  // u_j(x), 1-based, 0 outside I
    double support_lower(int j) const;
    double support_upper(int j) const;

    /// F_j(t) = integral of u_j against nu0 over I up to t.
    double cumulative(int j, double t) const;
    /// w_j = F_j at the upper endpoint. Computed, not assumed to be one;
    /// kernel draws renormalize by it.
    double normalization(int j) const;
    double max_normalization_defect() const;

    /// sum_j coeffs[j] u_j(x); with coefficients int_{J_j} h dnu0 this is the
    /// hat expansion of the interpolant of h.
    double expand(const std::vector<double>& coeffs, double x) const;

private:
    struct Element {
        std::vector<double> edges;  // 2-3 smooth pieces
        std::vector<double> cum;    // cumulative integral at edges
    };
    QuantilePartition part_;
    double peak_ = 0.0;
    std::vector<Element> elems_;
};

HatBasis build_hat_basis(QuantilePartition partition);

/// Per-cell integrals int_{J_j} f dnu0.
std::vector<double> cell_masses(const ScalarFn& f, const QuantilePartition& partition);

/// Interpolant with knot value masses[j] / mu at the cell barycenter, linear
/// between barycenters, flat out to the endpoints. Negative masses are
/// rejected.
PiecewiseLinearDensity hat_density(const std::vector<double>& masses,
                                   const QuantilePartition& partition);

/// The three discretization error functionals at a given partition:
///   H^2 = int (sqrt f - sqrt fhat)^2 dnu0   (fhat interpolates f's masses)
///   A^2 = int (sqrthat - sqrt f)^2 dnu0     (sqrthat interpolates sqrt f's masses)
///   B^2 = sum_j (int_{J_j} sqrt f dnu0 / sqrt mu - sqrt nu(J_j))^2
struct ApproxErrors {
    double H = 0.0;
    double A = 0.0;
    double B = 0.0;
    std::vector<double> masses_f;        // nu(J_j)
    std::vector<double> root_masses;     // int_{J_j} sqrt f dnu0
    PiecewiseLinearDensity f_hat;
    PiecewiseLinearDensity sqrt_f_hat;
};

ApproxErrors error_functionals(const ScalarFn& f, const QuantilePartition& partition);

/// int (f - approx)^2 dnu0 with splits at the approximant's knots.
double l2_distance_sq(const ScalarFn& f, const PiecewiseLinearDensity& approx,
                      const BaseMeasure& measure);

/// Smoothness-class bound on ||f - fhat_m||^2_{L2(nu0)}:
///   2 mu (3 K l^(1+gamma) + M l)^2 + 18 K^2 l^(2+2gamma)
/// with l the partition mesh. Requires a bounded interval.
double lemma_l2_bound(double gamma, double K, double M, const QuantilePartition& partition);

}  // namespace lecam
