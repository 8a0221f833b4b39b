#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "lecam/kernels.hpp"
#include "lecam/rng.hpp"
#include "lecam/stats.hpp"

using namespace lecam;

namespace {
constexpr double kPi = 3.14159265358979323846;
double sin_density(double x) { return 1.0 + 0.3 * std::sin(2.0 * kPi * x); }
}  // namespace

TEST_SUITE("kernels") {
    TEST_CASE("grouping statistic counts by closed-on-right cells") {
        QuantilePartition p = build_partition(BaseMeasure::uniform(0.0, 1.0), 4);
        const double b1 = p.breakpoints[0];
        std::vector<double> samples{0.1, b1, std::nextafter(b1, 1.0), 0.6, 0.99, 1.0, 0.0};
        std::vector<std::int64_t> counts = grouping_statistic(samples, p);
        REQUIRE(counts.size() == 4);
        // the breakpoint closes cell 1; 0.0 belongs to the first cell; 1.0 to the last
        CHECK(counts[0] == 3);
        CHECK(counts[1] == 1);
        CHECK(counts[2] == 1);
        CHECK(counts[3] == 2);
        CHECK(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}) ==
              static_cast<std::int64_t>(samples.size()));
        CHECK_THROWS_AS(grouping_statistic({1.5}, p), std::domain_error);
    }

    TEST_CASE("kernel draws are deterministic, in-support, and sized as asked") {
        HatBasis basis = build_hat_basis(build_partition(BaseMeasure::uniform(0.0, 1.0), 4));
        std::vector<std::int64_t> counts{3, 0, 5, 2};
        auto a = randomization_kernel_draw(counts, basis, 42, 500);
        auto b = randomization_kernel_draw(counts, basis, 42, 500);
        CHECK(a == b);
        CHECK(a.size() == 500);
        for (double x : a) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
        }
        auto c = randomization_kernel_draw(counts, basis, 42);
        CHECK(c.size() == 10);  // draws == 0 means sum of counts
        CHECK_THROWS_AS(randomization_kernel_draw({1, 2}, basis, 1), std::invalid_argument);
        CHECK_THROWS_AS(randomization_kernel_draw({-1, 1, 0, 0}, basis, 1),
                        std::invalid_argument);
    }

    TEST_CASE("degenerate counts put all draws inside the loaded element support") {
        HatBasis basis = build_hat_basis(build_partition(BaseMeasure::uniform(0.0, 1.0), 8));
        std::vector<std::int64_t> counts(8, 0);
        counts[3] = 50;  // only element 4 active
        auto draws = randomization_kernel_draw(counts, basis, 9, 2000);
        for (double x : draws) {
            CHECK(x >= basis.support_lower(4));
            CHECK(x <= basis.support_upper(4));
        }
    }

    TEST_CASE("smoothed model masses track the target within the frozen gap") {
        HatBasis basis = build_hat_basis(build_partition(BaseMeasure::uniform(0.0, 1.0), 8));
        KernelDiagnostics diag = cell_probability_discrepancy(sin_density, basis);
        REQUIRE(diag.model_cell_mass.size() == 8);
        REQUIRE(diag.target_cell_mass.size() == 8);
        double model_total = std::accumulate(diag.model_cell_mass.begin(),
                                             diag.model_cell_mass.end(), 0.0);
        double target_total = std::accumulate(diag.target_cell_mass.begin(),
                                              diag.target_cell_mass.end(), 0.0);
        CHECK(model_total == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(target_total == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(diag.max_abs_gap == doctest::Approx(0.0024721550980268).epsilon(1e-9));
        CHECK(diag.max_normalization_defect < 1e-12);
    }

    TEST_CASE("drift-only reconstruction ends at the weighted increment total") {
        HatBasis basis = build_hat_basis(build_partition(BaseMeasure::uniform(0.0, 1.0), 4));
        GridSpec grid = GridSpec::spanning_cells(basis.partition(), 4);
        YStarBuilder builder(basis, 100, grid);
        std::vector<double> inc{0.3, 0.1, 0.25, 0.2};
        Trajectory mean = builder.mean_path(inc);
        CHECK(mean.values.front() == 0.0);
        // at the right endpoint every primitive reaches its full normalization
        double expect = 0.0;
        for (int j = 1; j <= 4; ++j) {
            expect += inc[static_cast<std::size_t>(j - 1)] * basis.normalization(j);
        }
        CHECK(mean.values.back() == doctest::Approx(expect).epsilon(1e-10));
        // primitives are nondecreasing in t
        for (std::size_t k = 1; k < grid.times.size(); ++k) {
            for (std::size_t j = 1; j <= 4; ++j) {
                CHECK(builder.primitive(j, k) >= builder.primitive(j, k - 1) - 1e-15);
            }
        }
    }

    TEST_CASE("reconstructed paths are reproducible and bridge noise vanishes at ends") {
        HatBasis basis = build_hat_basis(build_partition(BaseMeasure::uniform(0.0, 1.0), 4));
        GridSpec grid = GridSpec::spanning_cells(basis.partition(), 4);
        YStarBuilder builder(basis, 100, grid);
        std::vector<double> inc{0.3, 0.1, 0.25, 0.2};
        Trajectory a = builder.path(inc, 5);
        Trajectory b = builder.path(inc, 5);
        Trajectory c = builder.path(inc, 6);
        CHECK(a.values == b.values);
        CHECK(a.values != c.values);
        Trajectory mean = builder.mean_path(inc);
        CHECK(a.values.front() == doctest::Approx(mean.values.front()).epsilon(1e-12));
        CHECK(a.values.back() == doctest::Approx(mean.values.back()).epsilon(1e-12));
    }

    TEST_CASE("unit-weight variance telescopes to the base cdf over 4n") {
        HatBasis basis = build_hat_basis(build_partition(BaseMeasure::uniform(0.0, 1.0), 8));
        const std::int64_t n = 50;
        for (double t : {0.2, 0.5, 0.83, 1.0}) {
            YStarMoments mom = y_star_theoretical_moments(sin_density, basis, n, t);
            CHECK(mom.variance == doctest::Approx(t / (4.0 * n)).epsilon(1e-9));
        }
        // mean at the endpoint is the full signal integral int sqrt f dnu0
        std::vector<double> means = increment_means(sin_density, basis.partition());
        double total = std::accumulate(means.begin(), means.end(), 0.0);
        YStarMoments end = y_star_theoretical_moments(sin_density, basis, n, 1.0);
        CHECK(end.mean == doctest::Approx(total).epsilon(1e-9));
    }

    TEST_CASE("covariance is symmetric and matches variance on the diagonal") {
        HatBasis basis = build_hat_basis(build_partition(BaseMeasure::uniform(0.0, 1.0), 8));
        const std::int64_t n = 50;
        double cst = y_star_theoretical_cov(basis, n, 0.3, 0.7);
        double cts = y_star_theoretical_cov(basis, n, 0.7, 0.3);
        CHECK(cst == doctest::Approx(cts).epsilon(1e-12));
        YStarMoments mom = y_star_theoretical_moments(sin_density, basis, n, 0.7);
        CHECK(y_star_theoretical_cov(basis, n, 0.7, 0.7) ==
              doctest::Approx(mom.variance).epsilon(1e-10));
        // covariance of the unit-weight case equals the variance at min(s,t)
        CHECK(cst == doctest::Approx(0.3 / (4.0 * n)).epsilon(1e-9));
    }

    TEST_CASE("one-call reconstruction agrees with builder plumbing") {
        HatBasis basis = build_hat_basis(build_partition(BaseMeasure::uniform(0.0, 1.0), 4));
        GridSpec grid = GridSpec::spanning_cells(basis.partition(), 4);
        Trajectory a = build_y_star_path(sin_density, basis, 100, grid, 31);
        Trajectory b = build_y_star_path(sin_density, basis, 100, grid, 31);
        CHECK(a.values == b.values);
        CHECK(a.times == grid.times);
        CHECK(a.values.size() == grid.times.size());
        for (double v : a.values) CHECK(std::isfinite(v));
    }
}
