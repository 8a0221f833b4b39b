#include <stdexcept>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lecam/config.hpp"
#include "lecam/csv.hpp"

using namespace lecam;

namespace {

// RAII helper so environment overrides cannot leak into other tests.
class ScopedEnv {
public:
    ScopedEnv(const char* name, const char* value) : name_(name) { setenv(name, value, 1); }
    ~ScopedEnv() { unsetenv(name_); }

private:
    const char* name_;
};

const char* kSampleConfig =
    "schema_version = 1\n"
    "# comment line\n"
    "[measure]\n"
    "family = power\n"
    "exponent = 2\n"
    "l = 1\n"
    "\n"
    "[battery]\n"
    "f = sinusoidal amp=0.2 freq=2 phase=0.5\n"
    "f = gamma theta=1.5\n"
    "\n"
    "[class]\n"
    "kappa = 0.6\n"
    "m = 1.4\n"
    "\n"
    "[study]\n"
    "n_grid = 100 1000\n"
    "m_list = 4 8\n"
    "seed = 7\n"
    "replicates = 3\n"
    "out_dir = /tmp/study\n";

}  // namespace

TEST_SUITE("config_csv") {
    TEST_CASE("defaults describe the sinusoidal battery on the unit interval") {
        StudyConfig config = default_config();
        CHECK(config.schema_version == 1);
        CHECK(config.measure_family == "uniform");
        REQUIRE(config.battery.size() == 5);
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(config.battery[k].family == "sinusoidal");
            CHECK(config.battery[k].params.at("amp") == 0.3);
            CHECK(config.battery[k].params.at("freq") == static_cast<double>(k + 1));
        }
        CHECK(config.n_grid == std::vector<std::int64_t>{1000, 10000, 100000, 1000000});
        CHECK(config.m_list == std::vector<int>{8, 16, 32, 64});
        CHECK(config.seed == 20260814);
        validate_config(config);
    }

    TEST_CASE("ini text parses into the expected fields") {
        StudyConfig config = parse_config_text(kSampleConfig);
        CHECK(config.measure_family == "power");
        CHECK(config.measure_exponent == 2.0);
        REQUIRE(config.battery.size() == 2);  // file battery replaces the default
        CHECK(config.battery[0].family == "sinusoidal");
        CHECK(config.battery[0].params.at("amp") == 0.2);
        CHECK(config.battery[1].family == "gamma");
        CHECK(config.battery[1].params.at("theta") == 1.5);
        CHECK(config.class_kappa == 0.6);
        CHECK(config.class_m == 1.4);
        CHECK(config.n_grid == std::vector<std::int64_t>{100, 1000});
        CHECK(config.m_list == std::vector<int>{4, 8});
        CHECK(config.seed == 7);
        CHECK(config.replicates == 3);
        CHECK(config.out_dir == "/tmp/study");
        validate_config(config);
    }

    TEST_CASE("malformed text is rejected with ConfigError") {
        CHECK_THROWS_AS(parse_config_text("[study]\nseed = 1\n"), ConfigError);  // no version
        CHECK_THROWS_AS(parse_config_text("schema_version = 1\n[nosuch]\nx = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("schema_version = 1\n[study]\nbogus = 1\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_text("schema_version = 1\n[study]\nseed\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("schema_version = 1\n[study]\nseed = abc\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_text("schema_version = 1\n[battery]\nf = nosuch\n"),
                        ConfigError);
        CHECK_THROWS_AS(
            parse_config_text("schema_version = 1\n[battery]\nf = sinusoidal amp\n"),
            ConfigError);
        // schema_version == 2 only fails at validation time
        StudyConfig config = parse_config_text("schema_version = 2\n[study]\nseed = 1\n");
        CHECK_THROWS_AS(validate_config(config), ConfigError);
    }

    TEST_CASE("validation rejects inconsistent studies") {
        StudyConfig config = default_config();
        config.n_grid = {100, 100};
        CHECK_THROWS_AS(validate_config(config), ConfigError);
        config = default_config();
        config.m_list.clear();
        config.m_rho = 1.5;
        CHECK_THROWS_AS(validate_config(config), ConfigError);
        config = default_config();
        config.battery[0].params["amp"] = 1.1;
        CHECK_THROWS_AS(validate_config(config), ConfigError);
        config = default_config();
        config.battery[0].params["slope"] = 1.5;  // 0.3 + 0.75 >= 1
        CHECK_THROWS_AS(validate_config(config), ConfigError);
        config = default_config();
        config.battery.clear();
        CHECK_THROWS_AS(validate_config(config), ConfigError);
        config = default_config();
        config.c_r = 0.0;
        CHECK_THROWS_AS(validate_config(config), ConfigError);
    }

    TEST_CASE("environment variables override parsed values") {
        ScopedEnv seed("LECAM_STUDY_SEED", "999");
        ScopedEnv kappa("LECAM_CLASS_KAPPA", "0.5");
        ScopedEnv battery("LECAM_BATTERY_F",
                          "sinusoidal amp=0.1 freq=1; constant");
        StudyConfig config = default_config();
        apply_env_overrides(config);
        CHECK(config.seed == 999);
        CHECK(config.class_kappa == 0.5);
        REQUIRE(config.battery.size() == 2);
        CHECK(config.battery[0].family == "sinusoidal");
        CHECK(config.battery[0].params.at("amp") == 0.1);
        CHECK(config.battery[1].family == "constant");
        validate_config(config);
    }

    TEST_CASE("measure factory builds each family") {
        StudyConfig config = default_config();
        config.measure_a = -1.0;
        config.measure_b = 3.0;
        BaseMeasure uniform = make_measure(config);
        CHECK(uniform.family_name() == "uniform");
        CHECK(uniform.total_mass() == doctest::Approx(4.0).epsilon(1e-12));
        config.measure_family = "power";
        BaseMeasure power = make_measure(config);
        CHECK(power.family_name() == "power_law");
        CHECK(power.total_mass() == doctest::Approx(0.5).epsilon(1e-10));
        config.measure_family = "exponential";
        config.measure_lambda = 2.0;
        BaseMeasure exponential = make_measure(config);
        CHECK(exponential.family_name() == "exponential");
        CHECK(exponential.total_mass() == doctest::Approx(0.5).epsilon(1e-10));
    }

    TEST_CASE("battery factory derives class constants per family") {
        StudyConfig config = default_config();
        config.battery.clear();
        BatterySpec sinusoid;
        sinusoid.family = "sinusoidal";
        sinusoid.params["amp"] = 0.3;
        sinusoid.params["freq"] = 2.0;
        config.battery.push_back(sinusoid);
        BatterySpec constant;
        constant.family = "constant";
        config.battery.push_back(constant);
        BaseMeasure measure = make_measure(config);
        std::vector<DensityParameter> battery = make_battery(config, measure);
        REQUIRE(battery.size() == 2);
        const double omega = 4.0 * 3.14159265358979323846;
        CHECK(battery[0].kappa == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(battery[0].M == doctest::Approx(0.3 * omega * (1.0 + 1e-7)).epsilon(1e-9));
        REQUIRE(battery[0].holder.has_value());
        CHECK(battery[0].holder->K ==
              doctest::Approx(0.3 * omega * omega * (1.0 + 1e-7)).epsilon(1e-9));
        CHECK(battery[0].f(0.25) == doctest::Approx(1.0 + 0.3 * std::sin(omega * 0.25)));
        CHECK(battery[1].f(0.9) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(battery[1].kappa == doctest::Approx(1.0).epsilon(1e-12));

        // truncated gamma member on the quadratic-weight measure
        StudyConfig gconfig = default_config();
        gconfig.measure_family = "power";
        gconfig.measure_exponent = 2.0;
        gconfig.measure_l = 1.0;
        gconfig.battery.clear();
        BatterySpec gamma;
        gamma.family = "gamma";
        gamma.params["theta"] = 1.5;
        gconfig.battery.push_back(gamma);
        BaseMeasure gmeasure = make_measure(gconfig);
        std::vector<DensityParameter> gbattery = make_battery(gconfig, gmeasure);
        REQUIRE(gbattery.size() == 1);
        CHECK(gbattery[0].M == doctest::Approx(5.08848767407).epsilon(1e-9));
        CHECK(gbattery[0].kappa == doctest::Approx(1.13539506963).epsilon(1e-9));
        CHECK(gbattery[0].f(0.0) == doctest::Approx(5.08848767407).epsilon(1e-9));
        // the member integrates to one against its measure
        CHECK(gmeasure.integrate(gbattery[0].f) == doctest::Approx(1.0).epsilon(1e-9));
    }

    TEST_CASE("partition-size schedule follows the list or the power rule") {
        StudyConfig config = default_config();
        CHECK(m_schedule_for(config, 1000) == std::vector<int>{8, 16, 32, 64});
        config.m_list.clear();
        config.m_rho = 0.4;
        CHECK(m_schedule_for(config, 1000) == std::vector<int>{16});
        // 1e5^0.4 is exactly 100; pow noise must not push the ceiling to 101
        CHECK(m_schedule_for(config, 100000) == std::vector<int>{100});
        CHECK(m_schedule_for(config, 1000000) == std::vector<int>{252});
        CHECK(m_schedule_for(config, 2) == std::vector<int>{2});
    }

    TEST_CASE("csv numbers round-trip doubles exactly") {
        for (double v : {0.1, 1.0 / 3.0, 12345.678901234567, 1e-300, -0.0, 2.5e17}) {
            std::string s = csv_number(v);
            CHECK(std::strtod(s.c_str(), nullptr) == v);
        }
        CHECK(csv_number(std::int64_t{-42}) == "-42");
        CHECK(csv_number(1.5) == "1.5");
    }

    TEST_CASE("csv rows join cells and reject separators in cells") {
        CHECK(csv_row({"a", "b", "c"}) == "a,b,c");
        CHECK(csv_row({}) == "");
        CHECK_THROWS_AS(csv_row({"a,b"}), std::invalid_argument);
        CHECK_THROWS_AS(csv_row({"a\nb"}), std::invalid_argument);
        CsvTable table;
        table.header = {"x", "y"};
        table.rows = {"1,2", "3,4"};
        CHECK(table.serialize() == "x,y\n1,2\n3,4\n");
    }

    TEST_CASE("text files write and read back verbatim") {
        std::string path = "/tmp/lecam_csv_roundtrip.txt";
        write_text_file(path, "alpha\nbeta\n");
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        CHECK(buffer.str() == "alpha\nbeta\n");
        CHECK_THROWS_AS(write_text_file("/nonexistent_dir_xyz/file.txt", "x"),
                        std::runtime_error);
        std::remove(path.c_str());
    }
}
