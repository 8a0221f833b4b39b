#include <stdexcept>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "lecam/rng.hpp"
#include "lecam/stats.hpp"

using namespace lecam;

TEST_SUITE("rng_stats") {
    TEST_CASE("streams are deterministic and key-separated") {
        RngStream a(derive_key(1, 2, 3));
        RngStream b(derive_key(1, 2, 3));
        RngStream c(derive_key(1, 2, 4));
        bool differs = false;
        for (int i = 0; i < 16; ++i) {
            std::uint64_t va = a.next_u64();
            CHECK(va == b.next_u64());
            if (va != c.next_u64()) differs = true;
        }
        CHECK(differs);
    }

    TEST_CASE("uniform draws live strictly inside the unit interval") {
        RngStream s(derive_key(7, 0));
        for (int i = 0; i < 100000; ++i) {
            double u = s.next_uniform();
            CHECK(u > 0.0);
            CHECK(u < 1.0);
        }
    }

    TEST_CASE("normal draws have the right first two moments") {
        RngStream s(derive_key(7, 1));
        std::vector<double> xs(100000);
        for (double& x : xs) x = s.next_normal();
        SampleSummary sum = summarize(xs);
        CHECK(std::abs(sum.mean) < 4.0 * sum.mean_se);
        CHECK(std::abs(sum.variance - 1.0) < 4.0 * sum.var_se);
    }

    TEST_CASE("normal cdf and quantile are mutual inverses") {
        for (double p : {1e-9, 1e-4, 0.025, 0.5, 0.975, 1.0 - 1e-4}) {
            CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) < 1e-12);
        }
        CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
        CHECK(normal_quantile(1e-9) == doctest::Approx(-5.9978070150076865).epsilon(1e-12));
        CHECK(normal_cdf(1.2345) == doctest::Approx(0.8914916766373298).epsilon(1e-12));
        CHECK_THROWS_AS(normal_quantile(-0.1), std::domain_error);
        CHECK_THROWS_AS(normal_quantile(1.5), std::domain_error);
    }

    TEST_CASE("chi-square tail probabilities match reference values") {
        CHECK(chi_square_tail(5.0, 7.0) == doctest::Approx(0.6599632296942824).epsilon(1e-10));
        CHECK(chi_square_tail(14.0671, 7.0) ==
              doctest::Approx(0.05000070405550947).epsilon(1e-10));
        CHECK(chi_square_tail(30.0, 7.0) ==
              doctest::Approx(9.495972508134177e-05).epsilon(1e-9));
        CHECK(chi_square_tail(0.0, 7.0) == doctest::Approx(1.0));
    }

    TEST_CASE("ks statistic agrees with the hand-computed value on a tiny sample") {
        double d = ks_statistic({0.1, 0.8, 0.4}, [](double x) { return x; });
        CHECK(d == doctest::Approx(4.0 / 15.0).epsilon(1e-12));
    }

    TEST_CASE("summarize reports unbiased variance and standard errors") {
        SampleSummary s = summarize({1.0, 2.0, 3.0, 4.0});
        CHECK(s.count == 4);
        CHECK(s.mean == doctest::Approx(2.5));
        CHECK(s.variance == doctest::Approx(5.0 / 3.0));
        CHECK(s.mean_se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
        CHECK(s.var_se > 0.0);
    }

    TEST_CASE("covariance matches the two-pass formula") {
        std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
        std::vector<double> ys{2.0, 1.0, 4.0, 5.0};
        CovSummary c = covariance(xs, ys);
        CHECK(c.cov == doctest::Approx(2.0));  // sum of centered products is 6, divisor n-1
        CHECK(c.se > 0.0);
    }

    TEST_CASE("log-log fit recovers an exact power law") {
        std::vector<double> xs{2.0, 4.0, 8.0, 16.0};
        std::vector<double> ys;
        for (double x : xs) ys.push_back(3.0 * std::pow(x, -1.5));
        auto fit = fit_loglog(xs, ys);
        REQUIRE(fit.has_value());
        CHECK(fit->slope == doctest::Approx(-1.5).epsilon(1e-12));
        CHECK(std::exp(fit->intercept) == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(fit->r2 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(!fit_loglog({1.0, 1.0}, {2.0, 3.0}).has_value());
        CHECK(!fit_loglog({1.0, 2.0}, {0.0, 3.0}).has_value());
    }

    TEST_CASE("latin hypercube stratifies every dimension") {
        RngStream s(derive_key(9, 9));
        auto pts = latin_hypercube(16, 3, s);
        REQUIRE(pts.size() == 16);
        for (std::size_t d = 0; d < 3; ++d) {
            std::set<int> strata;
            for (const auto& p : pts) {
                REQUIRE(p.size() == 3);
                CHECK(p[d] > 0.0);
                CHECK(p[d] < 1.0);
                strata.insert(static_cast<int>(p[d] * 16.0));
            }
            CHECK(strata.size() == 16);
        }
    }
}
