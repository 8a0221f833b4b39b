#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lecam/config.hpp"

namespace lecam {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
};

struct SuiteReport {
    std::vector<CheckResult> checks;
    double runtime_seconds = 0.0;

    bool all_pass() const;
};

/// Runs tasks 0..count-1 on `workers` threads (1 runs inline) and rethrows
/// the first task exception. Tasks must write results into preassigned
/// slots; aggregation order is then independent of scheduling.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task);

/// Evaluates every (n, m, battery member) cell of the study and writes
/// rate_study.csv plus the fitted log-log slopes in rate_slopes.csv.
/// Deterministic given the config; workers only change the thread count.
void run_rate_study(const StudyConfig& config, int workers, const std::string& out_dir);

/// Cross-module verification checks; writes verify.csv (name, status,
/// measured, threshold per row). MC checks derive their seeds from
/// config.seed, so the report is reproducible.
SuiteReport run_verification_suite(const StudyConfig& config, int workers,
                                   const std::string& out_dir);

/// End-to-end kernel demonstration on the first battery member: multinomial
/// counts, compound kernel draws vs the quadrature CDF, and Y* moments vs
/// theory. Writes kernel_demo.csv, ystar_moments.csv, ystar_path.csv, and
/// counts.csv; returns whether the summary statistics passed.
bool run_kernel_demo(const StudyConfig& config, int workers, const std::string& out_dir);

/// Writes partition.csv: per-cell endpoints, mass, barycenter, hat support
/// and normalization at demo_m.
void run_partition_dump(const StudyConfig& config, const std::string& out_dir);

/// Writes bounds.csv: a battery BoundReport per configured n (first m of the
/// schedule) plus the class-uniform report when the interval is bounded.
void run_bounds_report(const StudyConfig& config, const std::string& out_dir);

}  // namespace lecam
