#include "lecam/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lecam/experiments.hpp"

namespace lecam {

double step1_bound(const ScalarFn& f, const QuantilePartition& partition, std::int64_t n) {
    if (n <= 0) {
        throw std::invalid_argument("step1_bound: n must be positive");
    }
    ApproxErrors errors = error_functionals(f, partition);
    return std::sqrt(static_cast<double>(n)) * errors.H;
}

double carter_bound(int m, std::int64_t n, double c_r) {
    if (m < 2 || n < 1 || !(c_r > 0.0)) {
        throw std::invalid_argument("carter_bound: need m >= 2, n >= 1, c_r > 0");
    }
    return c_r * static_cast<double>(m) * std::log(static_cast<double>(m)) /
           std::sqrt(static_cast<double>(n));
}

GammaRatioCheck gamma_ratio_check(const std::vector<double>& gammas, double R) {
    if (gammas.empty()) {
        throw std::invalid_argument("gamma_ratio_check: empty probabilities");
    }
    double lo = gammas.front();
    double hi = gammas.front();
    for (double g : gammas) {
        if (!(g > 0.0)) {
            throw std::invalid_argument("gamma_ratio_check: probabilities must be positive");
        }
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    GammaRatioCheck check;
    check.observed = hi / lo;
    check.ok = check.observed <= R * (1.0 + 1e-12);
    return check;
}

Step4Parts step4_bound(const ScalarFn& f, const QuantilePartition& partition, std::int64_t n) {
    if (n <= 0) {
        throw std::invalid_argument("step4_bound: n must be positive");
    }
    ApproxErrors errors = error_functionals(f, partition);
    Step4Parts parts;
    double root_n = std::sqrt(static_cast<double>(n));
    parts.a_part = 2.0 * root_n * errors.A;
    parts.b_part = 2.0 * root_n * errors.B;
    parts.total = parts.a_part + parts.b_part;
    return parts;
}

BoundReport theorem1_total(const std::vector<DensityParameter>& battery,
                           const QuantilePartition& partition, std::int64_t n, double c_r) {
    if (battery.empty()) {
        throw std::invalid_argument("theorem1_total: battery must be nonempty");
    }
    if (n <= 0) {
        throw std::invalid_argument("theorem1_total: n must be positive");
    }
    double root_n = std::sqrt(static_cast<double>(n));
    BoundReport report;
    report.n = n;
    report.m = partition.m;
    report.c_r = c_r;
    for (const DensityParameter& member : battery) {
        ApproxErrors errors = error_functionals(member.f, partition);
        report.term_discretization =
            std::max(report.term_discretization, root_n * (errors.H + errors.A + errors.B));
        report.term_step1 = std::max(report.term_step1, root_n * errors.H);
        report.term_step4 =
            std::max(report.term_step4, 2.0 * root_n * (errors.A + errors.B));
        if (member.kappa > 0.0) {
            GammaRatioCheck check =
                gamma_ratio_check(cell_probabilities(member.f, partition), member.M / member.kappa);
            report.observed_ratio = std::max(report.observed_ratio, check.observed);
            report.ratio_ok = report.ratio_ok && check.ok;
        }
    }
    report.term_carter = carter_bound(partition.m, n, c_r);
    report.total = report.term_discretization + report.term_carter;
    return report;
}

BoundReport corollary1_total(double gamma, double K, double kappa, double M,
                             const QuantilePartition& partition, std::int64_t n, double c_r) {
    if (n <= 0) {
        throw std::invalid_argument("corollary1_total: n must be positive");
    }
    if (!(kappa > 0.0) || !(M >= kappa)) {
        throw std::invalid_argument("corollary1_total: need 0 < kappa <= M");
    }
    double nu_total = partition.measure.total_mass();
    if (kappa * nu_total > 1.0 + 1e-12) {
        throw std::invalid_argument(
            "corollary1_total: kappa * nu0(I) = " + std::to_string(kappa * nu_total) +
            " exceeds 1; no density of the class integrates to one");
    }
    double root_n = std::sqrt(static_cast<double>(n));
    // The squared interpolation error of any class member is bounded by the
    // smoothness-class constant; dividing by 4 kappa converts it to the
    // squared Hellinger-type functional. The root functionals A and B obey
    // the same bound with the constants of sqrt(f), namely
    // (gamma, K / sqrt(kappa), sqrt(M)).
    double h_cls = std::sqrt(lemma_l2_bound(gamma, K, M, partition) / (4.0 * kappa));
    double a_cls = std::sqrt(lemma_l2_bound(gamma, K / std::sqrt(kappa), std::sqrt(M), partition));
    double b_cls = a_cls;

    BoundReport report;
    report.n = n;
    report.m = partition.m;
    report.c_r = c_r;
    report.term_step1 = root_n * h_cls;
    report.term_step4 = 2.0 * root_n * (a_cls + b_cls);
    report.term_discretization = root_n * (h_cls + a_cls + b_cls);
    report.term_carter = carter_bound(partition.m, n, c_r);
    report.total = report.term_discretization + report.term_carter;
    report.observed_ratio = M / kappa;
    report.ratio_ok = true;
    return report;
}

}  // namespace lecam
