#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "lecam/divergences.hpp"
#include "test_support.hpp"

using namespace lecam;

TEST_SUITE("divergences") {
    TEST_CASE("two-level densities hit the closed-form distances") {
        BaseMeasure m = BaseMeasure::uniform(0.0, 1.0);
        auto p = [](double) { return 1.0; };
        auto q = [](double x) { return x < 0.5 ? 0.8 : 1.2; };
        L1HellingerResult r = l1_and_hellinger(p, q, m, {0.5});
        CHECK(r.l1.value == doctest::Approx(0.2).epsilon(1e-10));
        CHECK(r.hellinger_sq == doctest::Approx(0.0101276939898).epsilon(1e-9));
        CHECK(r.hellinger.value == doctest::Approx(0.10063644464).epsilon(1e-9));
        // p - q changes sign once, at the step
        REQUIRE(r.sign_changes.size() == 1);
        CHECK(r.sign_changes[0] == doctest::Approx(0.5).epsilon(1e-6));
        // half the L1 never exceeds the Hellinger distance
        CHECK(0.5 * r.l1.value <= r.hellinger.value + 1e-10);
    }

    TEST_CASE("identical densities give zero distances and no crossings") {
        BaseMeasure m = BaseMeasure::uniform(0.0, 1.0);
        auto p = [](double) { return 1.0; };
        L1HellingerResult r = l1_and_hellinger(p, p, m);
        CHECK(r.l1.value == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(r.hellinger.value == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(r.sign_changes.empty());
    }

    TEST_CASE("unnormalized inputs are rejected") {
        BaseMeasure m = BaseMeasure::uniform(0.0, 1.0);
        auto p = [](double) { return 1.0; };
        auto q = [](double) { return 2.0; };
        CHECK_THROWS_AS(l1_and_hellinger(p, q, m), std::invalid_argument);
    }

    TEST_CASE("gaussian hellinger matches the closed form") {
        CHECK(gaussian_hellinger_sq(0.0, 1.0, 1.0, 1.0) ==
              doctest::Approx(0.235006194831).epsilon(1e-9));
        CHECK(gaussian_hellinger_sq(0.0, 1.0, 0.5, 1.5) ==
              doctest::Approx(0.11506175801155538).epsilon(1e-12));
        CHECK(gaussian_hellinger_sq(0.3, 0.7, 0.3, 0.7) == doctest::Approx(0.0));
        CHECK(gaussian_hellinger_sq(1.0, 2.0, 0.0, 1.0) ==
              doctest::Approx(gaussian_hellinger_sq(0.0, 1.0, 1.0, 2.0)).epsilon(1e-14));
    }

    TEST_CASE("gaussian tv matches quadrature of the density gap") {
        CHECK(gaussian_tv_exact(0.0, 1.0, 1.0, 1.0) ==
              doctest::Approx(0.382924922548).epsilon(1e-9));
        CHECK(gaussian_tv_exact(0.0, 1.0, 0.5, 1.5) ==
              doctest::Approx(0.23778063584532735).epsilon(1e-10));
        // independent check: TV = (1/2) int |phi1 - phi2| over a wide window
        auto gap = [](double x) {
            return std::abs(testsupport::normal_pdf(x, 0.0, 1.0) -
                            testsupport::normal_pdf(x, 2.0, 0.6));
        };
        double simpson = 0.5 * testsupport::simpson(gap, -10.0, 12.0, 40001);
        CHECK(gaussian_tv_exact(0.0, 1.0, 2.0, 0.6) == doctest::Approx(simpson).epsilon(1e-8));
        CHECK(gaussian_tv_exact(0.0, 1.0, 0.0, 1.0) == doctest::Approx(0.0));
    }

    TEST_CASE("gaussian tv is symmetric while its bound is not") {
        double ab = gaussian_tv_exact(0.1, 0.9, -0.4, 1.7);
        double ba = gaussian_tv_exact(-0.4, 1.7, 0.1, 0.9);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-13));
        // the bound is evaluated literally in its argument order
        double b1 = gaussian_tv_bound(0.0, 1.0, 1.0, 2.0);
        double expect1 = std::sqrt(2.0 * (1.0 - 0.25) * (1.0 - 0.25) + 1.0 / 8.0);
        CHECK(b1 == doctest::Approx(expect1).epsilon(1e-14));
        double b2 = gaussian_tv_bound(1.0, 2.0, 0.0, 1.0);
        double expect2 = std::sqrt(2.0 * (1.0 - 4.0) * (1.0 - 4.0) + 1.0 / 2.0);
        CHECK(b2 == doctest::Approx(expect2).epsilon(1e-14));
        CHECK(b1 != b2);
        // and it dominates the exact value in both orders here
        CHECK(gaussian_tv_exact(0.0, 1.0, 1.0, 2.0) <= b1);
        CHECK(gaussian_tv_exact(1.0, 2.0, 0.0, 1.0) <= b2);
    }

    TEST_CASE("tensorization stays below the linear bound and grows to two") {
        double h2 = 0.01;
        for (std::int64_t n : {1, 2, 10, 1000}) {
            double exact = hellinger_tensorization_exact(h2, n);
            CHECK(exact <= static_cast<double>(n) * h2 + 1e-12);
            CHECK(exact >= 0.0);
            CHECK(exact <= 2.0);
        }
        CHECK(hellinger_tensorization_exact(h2, 1) == doctest::Approx(h2).epsilon(1e-12));
        CHECK(hellinger_tensorization_exact(2.0, 5) == doctest::Approx(2.0).epsilon(1e-12));
        double big = hellinger_tensorization_exact(0.5, 60);
        CHECK(big == doctest::Approx(2.0).epsilon(1e-6));
    }

    TEST_CASE("product bound is the root of the h-squared sum") {
        CHECK(hellinger_product_bound({0.04, 0.09}) ==
              doctest::Approx(std::sqrt(0.13)).epsilon(1e-14));
        CHECK(hellinger_product_bound({}) == 0.0);
        CHECK_THROWS_AS(hellinger_product_bound({-0.1}), std::invalid_argument);
    }

    TEST_CASE("gp drift-gap bound handles constants and kinks") {
        auto zero = [](double) { return 0.0; };
        auto c = [](double) { return 0.3; };
        auto s = [](double) { return 0.5; };
        double v = gp_l1_bound(zero, c, s, 0.0, 2.0);
        CHECK(v == doctest::Approx(0.3 / 0.5 * std::sqrt(2.0)).epsilon(1e-10));
        // kinked drift gap |x - 1| on [0, 2]: int (x-1)^2 dx = 2/3
        auto h1 = [](double x) { return std::abs(x - 1.0); };
        double kinked = gp_l1_bound(h1, zero, [](double) { return 1.0; }, 0.0, 2.0, {1.0});
        CHECK(kinked == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-10));
    }

    TEST_CASE("monte carlo tv carries an error bar and matches the gaussian truth") {
        ProductFactor factor;
        factor.sample = [](RngStream& stream) { return stream.next_normal(); };
        factor.log_p = [](double x) { return -0.5 * x * x; };
        factor.log_q = [](double x) { return -0.5 * (x - 1.0) * (x - 1.0); };
        DivergenceResult r = tv_monte_carlo_product({factor}, 200000, 17);
        CHECK(r.method == DivergenceResult::Method::monte_carlo);
        REQUIRE(r.standard_error.has_value());
        CHECK(r.tolerance == doctest::Approx(3.0 * *r.standard_error).epsilon(1e-12));
        CHECK(std::abs(r.value - 0.382924922548) < 4.0 * *r.standard_error);
        // identical factors collapse to zero exactly, not just statistically
        ProductFactor same;
        same.sample = [](RngStream& stream) { return stream.next_normal(); };
        same.log_p = [](double x) { return -0.5 * x * x; };
        same.log_q = same.log_p;
        DivergenceResult z = tv_monte_carlo_product({same, same}, 1000, 3);
        CHECK(z.value == doctest::Approx(0.0).epsilon(1e-12));
        // determinism per seed
        DivergenceResult r2 = tv_monte_carlo_product({factor}, 5000, 17);
        DivergenceResult r3 = tv_monte_carlo_product({factor}, 5000, 17);
        CHECK(r2.value == r3.value);
    }
}
