#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "lecam/approximation.hpp"
#include "test_support.hpp"

using namespace lecam;

namespace {
constexpr double kPi = 3.14159265358979323846;
double sin_density(double x) { return 1.0 + 0.3 * std::sin(2.0 * kPi * x); }
}  // namespace

TEST_SUITE("approximation") {
    TEST_CASE("hat elements peak at 1/mu and partition unity") {
        HatBasis basis = build_hat_basis(build_partition(BaseMeasure::uniform(0.0, 1.0), 8));
        CHECK(basis.peak() == doctest::Approx(8.0).epsilon(1e-12));
        CHECK(basis.value(3, basis.partition().barycenters[2]) ==
              doctest::Approx(8.0).epsilon(1e-12));
        // boundary elements stay flat at the peak out to their endpoint
        CHECK(basis.value(1, 0.0) == doctest::Approx(8.0).epsilon(1e-12));
        CHECK(basis.value(8, 1.0) == doctest::Approx(8.0).epsilon(1e-12));
        CHECK(basis.value(3, 0.9) == 0.0);
        std::vector<double> mu(8, basis.partition().cell_mass);
        for (int i = 0; i <= 100; ++i) {
            CHECK(std::abs(basis.expand(mu, i / 100.0) - 1.0) < 1e-12);
        }
    }

    TEST_CASE("supports span adjacent barycenters") {
        HatBasis basis = build_hat_basis(build_partition(BaseMeasure::uniform(0.0, 1.0), 8));
        const auto& bary = basis.partition().barycenters;
        CHECK(basis.support_lower(1) == 0.0);
        CHECK(basis.support_upper(1) == doctest::Approx(bary[1]));
        CHECK(basis.support_lower(4) == doctest::Approx(bary[2]));
        CHECK(basis.support_upper(4) == doctest::Approx(bary[4]));
        CHECK(basis.support_upper(8) == 1.0);
    }

    TEST_CASE("normalizations are computed, not assumed") {
        HatBasis uniform_basis =
            build_hat_basis(build_partition(BaseMeasure::uniform(0.0, 1.0), 8));
        CHECK(uniform_basis.max_normalization_defect() < 1e-12);
        HatBasis exp_basis = build_hat_basis(build_partition(BaseMeasure::exponential(1.0), 8));
        bool off_unity = false;
        for (int j = 1; j <= 8; ++j) {
            double w = exp_basis.normalization(j);
            CHECK(w > 0.0);
            if (std::abs(w - 1.0) > 1e-6) off_unity = true;
            // independent cross-check of w_j = int u_j dnu0, split at the peak
            // so neither panel straddles the kink
            double peak_x = exp_basis.partition().barycenters[static_cast<std::size_t>(j) - 1];
            auto uj = [&](double x) { return exp_basis.value(j, x); };
            double ref =
                exp_basis.measure().integrate(uj, exp_basis.support_lower(j), peak_x) +
                exp_basis.measure().integrate(uj, peak_x, exp_basis.support_upper(j));
            CHECK(w == doctest::Approx(ref).epsilon(1e-8));
        }
        CHECK(off_unity);  // a skewed weight must bend at least one element
    }

    TEST_CASE("cumulative element integrals hit the normalization at the top") {
        HatBasis basis = build_hat_basis(build_partition(BaseMeasure::exponential(1.0), 6));
        for (int j = 1; j <= 6; ++j) {
            CHECK(basis.cumulative(j, basis.support_lower(j)) == doctest::Approx(0.0));
            CHECK(basis.cumulative(j, 1e308) ==
                  doctest::Approx(basis.normalization(j)).epsilon(1e-10));
            double mid = 0.5 * (basis.support_lower(j) +
                                std::min(basis.support_upper(j), 40.0));
            double direct = basis.measure().integrate(
                [&](double x) { return basis.value(j, x); }, basis.support_lower(j), mid);
            CHECK(basis.cumulative(j, mid) == doctest::Approx(direct).epsilon(1e-8));
        }
    }

    TEST_CASE("error functionals match frozen reference values") {
        BaseMeasure m = BaseMeasure::uniform(0.0, 1.0);
        ApproxErrors e8 = error_functionals(sin_density, build_partition(m, 8));
        CHECK(e8.H == doctest::Approx(0.0140783166531878).epsilon(1e-9));
        CHECK(e8.A == doctest::Approx(0.0140234315592728).epsilon(1e-9));
        CHECK(e8.B == doctest::Approx(0.000360243062958035).epsilon(1e-8));
        ApproxErrors e16 = error_functionals(sin_density, build_partition(m, 16));
        CHECK(e16.H == doctest::Approx(0.00471655617796018).epsilon(1e-9));
        CHECK(e16.A == doctest::Approx(0.0047038451947711).epsilon(1e-9));
        CHECK(e16.B == doctest::Approx(9.21146952799406e-05).epsilon(1e-8));
    }

    TEST_CASE("squared distance between density and interpolant matches reference") {
        BaseMeasure m = BaseMeasure::uniform(0.0, 1.0);
        QuantilePartition p = build_partition(m, 16);
        ApproxErrors e = error_functionals(sin_density, p);
        double l2 = l2_distance_sq(sin_density, e.f_hat, m);
        CHECK(l2 == doctest::Approx(8.76034095203309e-05).epsilon(1e-8));
    }

    TEST_CASE("interpolant reproduces cell masses of the target density") {
        BaseMeasure m = BaseMeasure::uniform(0.0, 1.0);
        QuantilePartition p = build_partition(m, 8);
        std::vector<double> masses = cell_masses(sin_density, p);
        double total = 0.0;
        for (double v : masses) total += v;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
        PiecewiseLinearDensity f_hat = hat_density(masses, p);
        // knot values are mass ratios; at barycenter j the interpolant equals
        // masses[j] / mu exactly
        for (int j = 1; j <= 8; ++j) {
            CHECK(f_hat(p.barycenters[static_cast<std::size_t>(j - 1)]) ==
                  doctest::Approx(masses[static_cast<std::size_t>(j - 1)] / p.cell_mass)
                      .epsilon(1e-12));
        }
    }

    TEST_CASE("smoothness-based bound dominates the realized squared distance") {
        BaseMeasure m = BaseMeasure::uniform(0.0, 1.0);
        const double K = 0.3 * 4.0 * kPi * kPi * 1.0000001;
        const double M = 1.3000001;
        for (int cells : {8, 16, 32}) {
            QuantilePartition p = build_partition(m, cells);
            ApproxErrors e = error_functionals(sin_density, p);
            double l2 = l2_distance_sq(sin_density, e.f_hat, m);
            CHECK(l2 <= lemma_l2_bound(1.0, K, M, p));
        }
    }

    TEST_CASE("smoothness bound arithmetic at mu = mesh = 0.1") {
        QuantilePartition p = build_partition(BaseMeasure::uniform(0.0, 1.0), 10);
        // 2 mu (3 K l^2 + M l)^2 + 18 K^2 l^4 with K = M = 1
        CHECK(lemma_l2_bound(1.0, 1.0, 1.0, p) == doctest::Approx(0.00518).epsilon(1e-9));
    }

    TEST_CASE("exact-fit cases collapse the functionals to zero") {
        BaseMeasure m = BaseMeasure::uniform(0.0, 1.0);
        ApproxErrors e = error_functionals([](double) { return 1.0; }, build_partition(m, 8));
        CHECK(e.H < 1e-10);
        CHECK(e.A < 1e-10);
        CHECK(e.B < 1e-10);
    }
}
