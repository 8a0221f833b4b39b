#include "lecam/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lecam {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) {
            throw ConfigError("config: trailing characters in value of '" + key + "': " + value);
        }
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("config: cannot parse number for '" + key + "': " + value);
    }
}

std::int64_t parse_integer(const std::string& key, const std::string& value) {
    double v = parse_number(key, value);
    double r = std::round(v);
    if (std::abs(v - r) > 1e-9 || std::abs(v) > 9e18) {
        throw ConfigError("config: '" + key + "' must be an integer, got " + value);
    }
    return static_cast<std::int64_t>(r);
}

std::vector<std::string> split_ws(const std::string& value) {
    std::istringstream in(value);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) {
        out.push_back(tok);
    }
    return out;
}

BatterySpec parse_battery_spec(const std::string& value) {
    std::vector<std::string> tokens = split_ws(value);
    if (tokens.empty()) {
        throw ConfigError("config: empty battery entry");
    }
    BatterySpec spec;
    spec.family = lower(tokens.front());
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        std::size_t eq = tokens[i].find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= tokens[i].size()) {
            throw ConfigError("config: battery parameter must be key=value, got '" + tokens[i] +
                              "'");
        }
        std::string key = lower(tokens[i].substr(0, eq));
        spec.params[key] = parse_number("battery " + key, tokens[i].substr(eq + 1));
    }
    static const std::map<std::string, std::vector<std::string>> kAllowed = {
        {"constant", {"kappa", "m", "k", "gamma"}},
        {"sinusoidal", {"amp", "freq", "phase", "slope", "kappa", "m", "k", "gamma"}},
        {"gamma", {"theta", "kappa", "m", "k", "gamma"}},
    };
    auto it = kAllowed.find(spec.family);
    if (it == kAllowed.end()) {
        throw ConfigError("config: unknown battery family '" + spec.family +
                          "' (expected constant, sinusoidal, or gamma)");
    }
    for (const auto& [key, unused] : spec.params) {
        (void)unused;
        if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
            throw ConfigError("config: battery family '" + spec.family +
                              "' does not accept parameter '" + key + "'");
        }
    }
    return spec;
}

void apply_entry(StudyConfig& config, const std::string& section, const std::string& key,
                 const std::string& value, bool& battery_cleared) {
    if (section.empty()) {
        if (key == "schema_version") {
            config.schema_version = static_cast<int>(parse_integer(key, value));
            return;
        }
        throw ConfigError("config: key '" + key + "' appears before any section");
    }
    if (section == "measure") {
        if (key == "family") {
            config.measure_family = lower(trim(value));
        } else if (key == "a") {
            config.measure_a = parse_number(key, value);
        } else if (key == "b") {
            config.measure_b = parse_number(key, value);
        } else if (key == "exponent") {
            config.measure_exponent = parse_number(key, value);
        } else if (key == "l") {
            config.measure_l = parse_number(key, value);
        } else if (key == "lambda") {
            config.measure_lambda = parse_number(key, value);
        } else {
            throw ConfigError("config: unknown key '" + key + "' in [measure]");
        }
        return;
    }
    if (section == "battery") {
        if (key != "f") {
            throw ConfigError("config: [battery] only accepts repeated 'f = ...' lines");
        }
        if (!battery_cleared) {
            config.battery.clear();
            battery_cleared = true;
        }
        config.battery.push_back(parse_battery_spec(value));
        return;
    }
    if (section == "class") {
        if (key == "gamma") {
            config.class_gamma = parse_number(key, value);
        } else if (key == "k") {
            config.class_k = parse_number(key, value);
        } else if (key == "kappa") {
            config.class_kappa = parse_number(key, value);
        } else if (key == "m") {
            config.class_m = parse_number(key, value);
        } else {
            throw ConfigError("config: unknown key '" + key + "' in [class]");
        }
        return;
    }
    if (section == "study") {
        if (key == "n_grid") {
            config.n_grid.clear();
            for (const std::string& tok : split_ws(value)) {
                config.n_grid.push_back(parse_integer(key, tok));
            }
        } else if (key == "m_list") {
            config.m_list.clear();
            for (const std::string& tok : split_ws(value)) {
                config.m_list.push_back(static_cast<int>(parse_integer(key, tok)));
            }
        } else if (key == "m_rho") {
            config.m_rho = parse_number(key, value);
        } else if (key == "seed") {
            config.seed = static_cast<std::uint64_t>(parse_integer(key, value));
        } else if (key == "replicates") {
            config.replicates = static_cast<int>(parse_integer(key, value));
        } else if (key == "c_r") {
            config.c_r = parse_number(key, value);
        } else if (key == "out_dir") {
            config.out_dir = trim(value);
        } else if (key == "demo_n") {
            config.demo_n = parse_integer(key, value);
        } else if (key == "demo_m") {
            config.demo_m = static_cast<int>(parse_integer(key, value));
        } else if (key == "demo_paths") {
            config.demo_paths = static_cast<std::size_t>(parse_integer(key, value));
        } else if (key == "demo_draws") {
            config.demo_draws = static_cast<std::size_t>(parse_integer(key, value));
        } else {
            throw ConfigError("config: unknown key '" + key + "' in [study]");
        }
        return;
    }
    throw ConfigError("config: unknown section [" + section + "]");
}

}  // namespace

StudyConfig default_config() {
    StudyConfig config;
    for (int k = 1; k <= 5; ++k) {
        BatterySpec spec;
        spec.family = "sinusoidal";
        spec.params["amp"] = 0.3;
        spec.params["freq"] = static_cast<double>(k);
        spec.params["phase"] = 0.0;
        config.battery.push_back(spec);
    }
    return config;
}

StudyConfig parse_config_text(const std::string& text) {
    StudyConfig config = default_config();
    bool battery_cleared = false;
    bool saw_version = false;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": malformed section header");
            }
            section = lower(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        std::string key = lower(trim(line.substr(0, eq)));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": empty key or value");
        }
        if (key == "schema_version" && section.empty()) {
            saw_version = true;
        }
        apply_entry(config, section, key, value, battery_cleared);
    }
    if (!saw_version) {
        throw ConfigError("config: missing required 'schema_version = 1' line");
    }
    return config;
}

void apply_env_overrides(StudyConfig& config) {
    struct EnvKey {
        const char* env;
        const char* section;
        const char* key;
    };
    static const EnvKey kKeys[] = {
        {"LECAM_SCHEMA_VERSION", "", "schema_version"},
        {"LECAM_MEASURE_FAMILY", "measure", "family"},
        {"LECAM_MEASURE_A", "measure", "a"},
        {"LECAM_MEASURE_B", "measure", "b"},
        {"LECAM_MEASURE_EXPONENT", "measure", "exponent"},
        {"LECAM_MEASURE_L", "measure", "l"},
        {"LECAM_MEASURE_LAMBDA", "measure", "lambda"},
        {"LECAM_CLASS_GAMMA", "class", "gamma"},
        {"LECAM_CLASS_K", "class", "k"},
        {"LECAM_CLASS_KAPPA", "class", "kappa"},
        {"LECAM_CLASS_M", "class", "m"},
        {"LECAM_STUDY_N_GRID", "study", "n_grid"},
        {"LECAM_STUDY_M_LIST", "study", "m_list"},
        {"LECAM_STUDY_M_RHO", "study", "m_rho"},
        {"LECAM_STUDY_SEED", "study", "seed"},
        {"LECAM_STUDY_REPLICATES", "study", "replicates"},
        {"LECAM_STUDY_C_R", "study", "c_r"},
        {"LECAM_STUDY_OUT_DIR", "study", "out_dir"},
        {"LECAM_STUDY_DEMO_N", "study", "demo_n"},
        {"LECAM_STUDY_DEMO_M", "study", "demo_m"},
        {"LECAM_STUDY_DEMO_PATHS", "study", "demo_paths"},
        {"LECAM_STUDY_DEMO_DRAWS", "study", "demo_draws"},
    };
    bool battery_cleared = false;
    for (const EnvKey& entry : kKeys) {
        const char* value = std::getenv(entry.env);
        if (value != nullptr && *value != '\0') {
            apply_entry(config, entry.section, entry.key, trim(value), battery_cleared);
        }
    }
    const char* battery = std::getenv("LECAM_BATTERY_F");
    if (battery != nullptr && *battery != '\0') {
        // Semicolon-separated list of battery entries replacing the file's.
        config.battery.clear();
        std::string text(battery);
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find(';', start);
            std::string piece =
                trim(text.substr(start, end == std::string::npos ? std::string::npos : end - start));
            if (!piece.empty()) {
                config.battery.push_back(parse_battery_spec(piece));
            }
            if (end == std::string::npos) {
                break;
            }
            start = end + 1;
        }
    }
}

StudyConfig load_config(const std::string& path) {
    StudyConfig config;
    if (path.empty()) {
        config = default_config();
    } else {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("config: cannot open '" + path + "'");
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        config = parse_config_text(buffer.str());
    }
    apply_env_overrides(config);
    validate_config(config);
    return config;
}

void validate_config(const StudyConfig& config) {
    if (config.schema_version != 1) {
        throw ConfigError("config: unsupported schema_version " +
                          std::to_string(config.schema_version));
    }
    if (config.measure_family != "uniform" && config.measure_family != "power" &&
        config.measure_family != "exponential") {
        throw ConfigError("config: unknown measure family '" + config.measure_family + "'");
    }
    if (config.measure_family == "uniform" && !(config.measure_a < config.measure_b)) {
        throw ConfigError("config: uniform measure needs a < b");
    }
    if (config.measure_family == "power" &&
        (!(config.measure_exponent > 0.0) || !(config.measure_l > 0.0))) {
        throw ConfigError("config: power measure needs exponent > 0 and l > 0");
    }
    if (config.measure_family == "exponential" && !(config.measure_lambda > 0.0)) {
        throw ConfigError("config: exponential measure needs lambda > 0");
    }
    if (config.battery.empty()) {
        throw ConfigError("config: battery must be nonempty");
    }
    if (config.n_grid.empty()) {
        throw ConfigError("config: n_grid must be nonempty");
    }
    for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
        if (config.n_grid[i] < 1) {
            throw ConfigError("config: n_grid entries must be >= 1");
        }
        if (i > 0 && config.n_grid[i] <= config.n_grid[i - 1]) {
            throw ConfigError("config: n_grid must be strictly increasing");
        }
    }
    for (int m : config.m_list) {
        if (m < 2) {
            throw ConfigError("config: m_list entries must be >= 2");
        }
    }
    if (config.m_list.empty() && !(config.m_rho > 0.0 && config.m_rho < 1.0)) {
        throw ConfigError("config: m_rho must lie in (0, 1) when m_list is empty");
    }
    if (config.replicates < 1) {
        throw ConfigError("config: replicates must be >= 1");
    }
    if (!(config.c_r > 0.0)) {
        throw ConfigError("config: c_r must be positive");
    }
    if (config.demo_n < 1 || config.demo_m < 2 || config.demo_paths < 1 ||
        config.demo_draws < 1) {
        throw ConfigError("config: demo parameters must be positive (demo_m >= 2)");
    }
    for (const BatterySpec& spec : config.battery) {
        if (spec.family == "sinusoidal") {
            double amp = spec.params.count("amp") ? spec.params.at("amp") : 0.3;
            double slope = spec.params.count("slope") ? spec.params.at("slope") : 0.0;
            if (!(amp >= 0.0) || amp + 0.5 * std::abs(slope) >= 1.0) {
                throw ConfigError(
                    "config: sinusoidal battery entry must keep amp + |slope|/2 < 1");
            }
            double freq = spec.params.count("freq") ? spec.params.at("freq") : 1.0;
            if (!(freq > 0.0) || std::abs(freq - std::round(freq)) > 1e-9) {
                throw ConfigError("config: sinusoidal freq must be a positive integer");
            }
        } else if (spec.family == "gamma") {
            double theta = spec.params.count("theta") ? spec.params.at("theta") : 1.0;
            if (!(theta > 0.0)) {
                throw ConfigError("config: gamma battery entry needs theta > 0");
            }
        }
    }
}

BaseMeasure make_measure(const StudyConfig& config) {
    if (config.measure_family == "uniform") {
        return BaseMeasure::uniform(config.measure_a, config.measure_b);
    }
    if (config.measure_family == "power") {
        return BaseMeasure::power_law(config.measure_exponent, config.measure_l);
    }
    return BaseMeasure::exponential(config.measure_lambda);
}

std::vector<DensityParameter> make_battery(const StudyConfig& config,
                                           const BaseMeasure& measure) {
    constexpr double kSlack = 1.0 + 1e-7;
    std::vector<DensityParameter> battery;
    for (const BatterySpec& spec : config.battery) {
        auto param = [&spec](const std::string& key, double fallback) {
            auto it = spec.params.find(key);
            return it == spec.params.end() ? fallback : it->second;
        };
        DensityParameter member;
        char label[128];
        if (spec.family == "constant") {
            double level = 1.0 / measure.total_mass();
            member.f = [level](double) { return level; };
            member.kappa = param("kappa", level);
            member.M = param("m", level);
            member.holder = HolderSpec{param("gamma", 1.0), param("k", 0.0)};
            std::snprintf(label, sizeof(label), "constant");
        } else if (spec.family == "sinusoidal") {
            double amp = param("amp", 0.3);
            double freq = param("freq", 1.0);
            double phase = param("phase", 0.0);
            double slope = param("slope", 0.0);
            double omega = 2.0 * 3.14159265358979323846 * freq;
            member.f = [amp, omega, phase, slope](double x) {
                return 1.0 + slope * (x - 0.5) + amp * std::sin(omega * x + phase);
            };
            member.kappa = param("kappa", 1.0 - amp - 0.5 * std::abs(slope));
            member.M = param("m", std::max(1.0 + amp + 0.5 * std::abs(slope),
                                           std::abs(slope) + amp * omega) *
                                      kSlack);
            member.holder = HolderSpec{param("gamma", 1.0), param("k", amp * omega * omega * kSlack)};
            std::snprintf(label, sizeof(label), "sinusoidal_k%g_amp%g", freq, amp);
        } else {
            double theta = param("theta", 1.0);
            double z = measure.integrate([theta](double x) { return std::exp(-theta * x); });
            member.f = [theta, z](double x) { return std::exp(-theta * x) / z; };
            const IntervalSpec& iv = measure.interval();
            member.M = param("m", std::exp(-theta * iv.lower) / z);
            member.kappa =
                param("kappa", iv.finite() ? std::exp(-theta * iv.upper) / z : 0.0);
            member.holder = HolderSpec{param("gamma", 1.0), param("k", theta * theta / z * kSlack)};
            std::snprintf(label, sizeof(label), "gamma_theta%g", theta);
        }
        member.label = label;
        battery.push_back(std::move(member));
    }
    return battery;
}

std::vector<int> m_schedule_for(const StudyConfig& config, std::int64_t n) {
    if (!config.m_list.empty()) {
        return config.m_list;
    }
    // pow can land a few ulps above an exact integer power (1e5^0.4 gives
    // 100.00000000000003); shave a relative epsilon so the ceiling is the
    // mathematical one.
    double p = std::pow(static_cast<double>(n), config.m_rho);
    double m = std::ceil(p * (1.0 - 1e-12));
    return {std::max(2, static_cast<int>(m))};
}

}  // namespace lecam
