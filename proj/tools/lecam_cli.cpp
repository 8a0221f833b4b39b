#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "lecam/config.hpp"
#include "lecam/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Density experiment to white noise equivalence toolkit"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int workers = 1;
    app.add_option("--config", config_path, "INI configuration file")
        ->check(CLI::ExistingFile);
    CLI::Option* seed_opt = app.add_option("--seed", seed, "Override the configured seed");
    app.add_option("--out", out_dir, "Output directory (overrides the configured one)");
    app.add_option("--workers", workers, "Worker thread count")->check(CLI::Range(1, 512));

    CLI::App* rate = app.add_subcommand(
        "rate-study", "Evaluate discretization functionals over the (n, m) grid");
    CLI::App* verify = app.add_subcommand(
        "verify", "Run the deterministic verification suite");
    CLI::App* demo = app.add_subcommand(
        "kernel-demo", "Sample the randomization kernel and signal reconstruction");
    CLI::App* partition = app.add_subcommand(
        "partition", "Dump the quantile partition and hat basis layout");
    CLI::App* bounds = app.add_subcommand(
        "bounds", "Report deficiency bound terms for the configured battery");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        lecam::StudyConfig config = lecam::load_config(config_path);
        if (seed_opt->count() > 0) {
            config.seed = seed;
        }
        if (!out_dir.empty()) {
            config.out_dir = out_dir;
        }

        if (rate->parsed()) {
            lecam::run_rate_study(config, workers, config.out_dir);
            std::printf("rate study written to %s\n", config.out_dir.c_str());
            return 0;
        }
        if (verify->parsed()) {
            lecam::SuiteReport report =
                lecam::run_verification_suite(config, workers, config.out_dir);
            for (const lecam::CheckResult& check : report.checks) {
                std::printf("[%s] %-40s measured=%.6g threshold=%.6g\n",
                            check.pass ? "PASS" : "FAIL", check.name.c_str(), check.measured,
                            check.threshold);
            }
            std::printf("%zu checks in %.2fs\n", report.checks.size(), report.runtime_seconds);
            return report.all_pass() ? 0 : 1;
        }
        if (demo->parsed()) {
            bool ok = lecam::run_kernel_demo(config, workers, config.out_dir);
            std::printf("kernel demo %s (see %s)\n", ok ? "passed" : "FAILED",
                        config.out_dir.c_str());
            return ok ? 0 : 1;
        }
        if (partition->parsed()) {
            lecam::run_partition_dump(config, config.out_dir);
            std::printf("partition dump written to %s\n", config.out_dir.c_str());
            return 0;
        }
        if (bounds->parsed()) {
            lecam::run_bounds_report(config, config.out_dir);
            std::printf("bounds report written to %s\n", config.out_dir.c_str());
            return 0;
        }
    } catch (const lecam::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
