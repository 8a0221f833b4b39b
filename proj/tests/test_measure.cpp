#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "lecam/measure.hpp"
#include "test_support.hpp"

using namespace lecam;

TEST_SUITE("measure") {
    TEST_CASE("uniform measure closed forms") {
        BaseMeasure m = BaseMeasure::uniform(-1.0, 3.0);
        CHECK(m.total_mass() == doctest::Approx(4.0).epsilon(1e-13));
        CHECK(m.cdf(0.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.quantile(0.25) == doctest::Approx(0.0).epsilon(1e-11));
        CHECK(m.quantile(0.0) == -1.0);
        CHECK(m.quantile(1.0) == 3.0);
        CHECK(m.quantile_of_mass(2.0) == doctest::Approx(1.0).epsilon(1e-11));
        CHECK(m.g(0.5) == 1.0);
        CHECK_THROWS_AS(BaseMeasure::uniform(1.0, 1.0), std::invalid_argument);
    }

    TEST_CASE("power law measure closed forms") {
        BaseMeasure m = BaseMeasure::power_law(2.0, 1.0);
        CHECK(m.total_mass() == doctest::Approx(0.5).epsilon(1e-12));
        // cdf(t) = t^2 / 2, quantile(p) = sqrt(p)
        CHECK(m.cdf(0.5) == doctest::Approx(0.125).epsilon(1e-12));
        CHECK(m.quantile(0.25) == doctest::Approx(0.5).epsilon(1e-11));
        BaseMeasure half = BaseMeasure::power_law(0.5, 1.0);
        CHECK(half.total_mass() == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(half.cdf(0.25) == doctest::Approx(1.0).epsilon(1e-11));
        CHECK_THROWS_AS(BaseMeasure::power_law(0.0, 1.0), std::invalid_argument);
    }

    TEST_CASE("exponential measure closed forms") {
        BaseMeasure m = BaseMeasure::exponential(2.0);
        CHECK(m.total_mass() == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(m.cdf(1.0) == doctest::Approx(0.5 * (1.0 - std::exp(-2.0))).epsilon(1e-12));
        CHECK(m.quantile(0.5) == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-11));
        CHECK(std::isinf(m.quantile(1.0)));
        CHECK(!m.interval().finite());
        CHECK_THROWS_AS(m.quantile(1.5), std::domain_error);
    }

    TEST_CASE("general density measure matches reference integrals") {
        // nu0(dx) = x dx on [0, 2]; normalizer of exp(-x) against it and the
        // mean of the normalized density, both against closed forms.
        BaseMeasure m = BaseMeasure::from_density({0.0, 2.0, true, true},
                                                  [](double x) { return x; }, "linear_g");
        CHECK(m.total_mass() == doctest::Approx(2.0).epsilon(1e-12));
        double z = m.integrate([](double x) { return std::exp(-x); });
        CHECK(z == doctest::Approx(0.59399415029).epsilon(1e-10));
        double mean = m.integrate([](double x) { return x * std::exp(-x); }) / z;
        CHECK(mean == doctest::Approx(1.08864231629).epsilon(1e-10));
        CHECK(m.family_name() == "linear_g");
    }

    TEST_CASE("tabulated measure integrates its trapezoids exactly") {
        BaseMeasure m = BaseMeasure::tabulated({0.0, 1.0, 3.0}, {1.0, 2.0, 0.0});
        CHECK(m.total_mass() == doctest::Approx(1.5 + 2.0).epsilon(1e-12));
        CHECK(m.cdf(1.0) == doctest::Approx(1.5).epsilon(1e-11));
        CHECK_THROWS_AS(BaseMeasure::tabulated({0.0, 1.0}, {1.0, -1.0}), std::invalid_argument);
        CHECK_THROWS_AS(BaseMeasure::tabulated({1.0, 0.0}, {1.0, 1.0}), std::invalid_argument);
    }

    TEST_CASE("infinite tail integrals agree with a truncated Simpson oracle") {
        BaseMeasure m = BaseMeasure::exponential(1.0);
        double v = m.integrate([](double x) { return x * x; });
        double ref = testsupport::simpson(
            [](double x) { return x * x * std::exp(-x); }, 0.0, 60.0, 100001);
        CHECK(v == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(v == doctest::Approx(ref).epsilon(1e-8));
    }

    TEST_CASE("split integration slices the whole interval at interior kinks") {
        BaseMeasure m = BaseMeasure::uniform(0.0, 1.0);
        double v = m.integrate_split([](double x) { return std::abs(x - 0.25); }, {0.25});
        double exact = (0.25 * 0.25 + 0.75 * 0.75) / 2.0;
        CHECK(v == doctest::Approx(exact).epsilon(1e-12));
    }

    TEST_CASE("plain Lebesgue window integral ignores the weight") {
        BaseMeasure m = BaseMeasure::power_law(2.0, 1.0);
        double v = m.integrate_dx([](double x) { return x; }, 0.0, 1.0);
        CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
    }

    TEST_CASE("class membership check accepts and rejects as documented") {
        BaseMeasure m = BaseMeasure::uniform(0.0, 1.0);
        DensityParameter good;
        good.f = [](double x) { return 1.0 + 0.3 * std::sin(2.0 * 3.14159265358979323846 * x); };
        good.kappa = 0.7;
        good.M = 1.3 + 1e-9;
        good.holder = HolderSpec{1.0, 0.3 * 4.0 * 9.8696044010893586188 * 1.0000001};
        ClassReport rep = check_class_membership(good, m);
        CHECK(rep.within_bounds);
        CHECK(rep.holder_ok);
        CHECK(rep.integral_defect < 1e-9);

        DensityParameter bad = good;
        bad.kappa = 0.9;  // true minimum is 0.7
        CHECK(!check_class_membership(bad, m).within_bounds);

        DensityParameter rough = good;
        rough.holder = HolderSpec{1.0, 0.1};  // far below the true derivative modulus
        CHECK(!check_class_membership(rough, m).holder_ok);
    }

    TEST_CASE("rejection sampler honors the envelope and is deterministic") {
        BaseMeasure m = BaseMeasure::uniform(0.0, 1.0);
        DensityParameter p;
        p.f = [](double x) { return 2.0 * x; };
        p.kappa = 0.0;
        p.M = 2.0;
        auto a = sample_from_density(m, p, 500, 42);
        auto b = sample_from_density(m, p, 500, 42);
        CHECK(a == b);
        double mean = 0.0;
        for (double x : a) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
            mean += x;
        }
        mean /= 500.0;
        CHECK(std::abs(mean - 2.0 / 3.0) < 0.05);

        DensityParameter lying = p;
        lying.M = 1.0;  // f exceeds the claimed envelope
        CHECK_THROWS_AS(sample_from_density(m, lying, 10, 1), std::runtime_error);
    }
}
