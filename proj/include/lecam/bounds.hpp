#pragma once

#include <cstdint>
#include <vector>

#include "lecam/approximation.hpp"

namespace lecam {

/// Assembled deficiency bound between the sampling model and the white-noise
/// model at sample size n and partition size m. The total is always
/// term_discretization + term_carter; the step-1 and step-4 terms are the
/// intermediate one-leg bounds, reported for inspection.
struct BoundReport {
    std::int64_t n = 0;
    int m = 0;
    double c_r = 1.0;
    double term_discretization = 0.0;  ///< sqrt(n) * sup (H + A + B)
    double term_carter = 0.0;          ///< C_R * m * ln(m) / sqrt(n)
    double term_step1 = 0.0;           ///< sqrt(n) * sup H
    double term_step4 = 0.0;           ///< 2 sqrt(n) * sup (A + B)
    double total = 0.0;
    bool ratio_ok = true;       ///< sup_j gamma_j / inf_j gamma_j <= M / kappa held
    double observed_ratio = 0.0;
};

/// sqrt(n) * H_m(f): the Hellinger product bound between the n-fold sampling
/// model under f and under its hat interpolant.
double step1_bound(const ScalarFn& f, const QuantilePartition& partition, std::int64_t n);

/// C_R * m * ln(m) / sqrt(n): the multinomial-to-Gaussian comparison bound.
double carter_bound(int m, std::int64_t n, double c_r);

/// Checks the cell-probability ratio condition max gamma / min gamma <= R.
struct GammaRatioCheck {
    double observed = 0.0;
    bool ok = true;
};
GammaRatioCheck gamma_ratio_check(const std::vector<double>& gammas, double R);

/// 2 sqrt(n) * (A_m(f) + B_m(f)) with the two addends reported separately.
struct Step4Parts {
    double a_part = 0.0;
    double b_part = 0.0;
    double total = 0.0;
};
Step4Parts step4_bound(const ScalarFn& f, const QuantilePartition& partition, std::int64_t n);

/// Battery form of the main bound: the supremum over the density class is
/// realized as a maximum over the supplied battery members.
BoundReport theorem1_total(const std::vector<DensityParameter>& battery,
                           const QuantilePartition& partition, std::int64_t n, double c_r);

/// Class-uniform form on a bounded interval: every term is produced from the
/// smoothness constants (gamma, K, kappa, M) alone via the interpolation
/// error bound, so the report dominates theorem1_total for every member of
/// the class without evaluating any density. Rejects kappa * nu0(I) > 1,
/// which no density of the class can satisfy.
BoundReport corollary1_total(double gamma, double K, double kappa, double M,
                             const QuantilePartition& partition, std::int64_t n, double c_r);

}  // namespace lecam
