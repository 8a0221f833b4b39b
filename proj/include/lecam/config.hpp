#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lecam/measure.hpp"

namespace lecam {

/// Configuration problem: malformed text, unknown key, invalid value. The
/// CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// One battery entry: family name plus its numeric parameters.
struct BatterySpec {
    std::string family;  // constant | sinusoidal | gamma
    std::map<std::string, double> params;
};

/// Parsed study configuration. The text format is line-oriented INI:
/// `schema_version = 1` first, then [measure], [battery], [class], [study]
/// sections of `key = value` lines. `#` and `;` start comments. Battery
/// entries repeat the key `f`, e.g. `f = sinusoidal amp=0.3 freq=2 phase=0`.
/// Every key can be overridden by an environment variable named
/// LECAM_<SECTION>_<KEY> (LECAM_SCHEMA_VERSION for the version line).
struct StudyConfig {
    int schema_version = 1;

    std::string measure_family = "uniform";  // uniform | power | exponential
    double measure_a = 0.0;                  // uniform lower endpoint
    double measure_b = 1.0;                  // uniform upper endpoint
    double measure_exponent = 2.0;           // power exponent a in g = x^(a-1)
    double measure_l = 1.0;                  // power upper endpoint L
    double measure_lambda = 1.0;             // exponential rate

    std::vector<BatterySpec> battery;

    double class_gamma = 1.0;
    double class_k = 1.0;
    double class_kappa = 0.7;
    double class_m = 1.3;

    std::vector<std::int64_t> n_grid = {1000, 10000, 100000, 1000000};
    std::vector<int> m_list = {8, 16, 32, 64};
    double m_rho = 0.4;  // used when m_list is empty: m = ceil(n^rho)
    std::uint64_t seed = 20260814;
    int replicates = 20;
    double c_r = 1.0;
    std::string out_dir = ".";

    std::int64_t demo_n = 200;
    int demo_m = 8;
    std::size_t demo_paths = 2000;
    std::size_t demo_draws = 100000;
};

/// The built-in defaults: uniform base measure on [0,1] and the sinusoidal
/// battery 1 + 0.3 sin(2 pi k x), k = 1..5.
StudyConfig default_config();

/// Parses configuration text; unknown sections or keys are errors.
StudyConfig parse_config_text(const std::string& text);

/// Loads `path` (or the defaults when empty) and applies environment
/// overrides.
StudyConfig load_config(const std::string& path);

/// Applies LECAM_* environment variables on top of a parsed config.
void apply_env_overrides(StudyConfig& config);

/// Rejects inconsistent configurations (empty battery, non-increasing
/// n-grid, rho outside (0,1), nonpositive sizes).
void validate_config(const StudyConfig& config);

/// Instantiates the configured base measure.
BaseMeasure make_measure(const StudyConfig& config);

/// Instantiates the battery against the given measure, deriving default
/// class constants per family when not overridden on the entry.
std::vector<DensityParameter> make_battery(const StudyConfig& config, const BaseMeasure& measure);

/// Partition sizes to pair with a given n: the explicit m-list when present,
/// otherwise the single rule value ceil(n^rho).
std::vector<int> m_schedule_for(const StudyConfig& config, std::int64_t n);

}  // namespace lecam
