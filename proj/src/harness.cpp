#include "lecam/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>

#include "lecam/bounds.hpp"
#include "lecam/csv.hpp"
#include "lecam/divergences.hpp"
#include "lecam/kernels.hpp"
#include "lecam/stats.hpp"

namespace lecam {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string path_join(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") {
        return name;
    }
    return dir + "/" + name;
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty() && dir != ".") {
        std::filesystem::create_directories(dir);
    }
}

ScalarFn sinusoid(double amp, double freq, double phase = 0.0) {
    double omega = 2.0 * kPi * freq;
    return [amp, omega, phase](double x) { return 1.0 + amp * std::sin(omega * x + phase); };
}

double sinusoid_cdf(double amp, double freq, double x) {
    double omega = 2.0 * kPi * freq;
    return x + amp * (1.0 - std::cos(omega * x)) / omega;
}

CheckResult make_result(const std::string& name, double measured, double threshold, bool pass) {
    CheckResult result;
    result.name = name;
    result.pass = pass;
    result.measured = measured;
    result.threshold = threshold;
    return result;
}

CheckResult at_most(const std::string& name, double measured, double threshold) {
    return make_result(name, measured, threshold, measured <= threshold);
}

std::vector<std::int64_t> apportion_counts(const std::vector<double>& probs, std::int64_t n) {
    std::vector<std::int64_t> counts(probs.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::int64_t assigned = 0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        double target = static_cast<double>(n) * probs[j];
        std::int64_t base = static_cast<std::int64_t>(std::floor(target));
        counts[j] = base;
        assigned += base;
        remainders.emplace_back(target - static_cast<double>(base), j);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) {
            return a.first > b.first;
        }
        return a.second < b.second;
    });
    for (std::int64_t k = 0; k < n - assigned && k < static_cast<std::int64_t>(remainders.size());
         ++k) {
        ++counts[remainders[static_cast<std::size_t>(k)].second];
    }
    return counts;
}

struct Check {
    std::string name;
    std::function<CheckResult(std::uint64_t)> run;
};

// ---- individual verification checks ----------------------------------------

CheckResult check_quantile_cdf_roundtrip(std::uint64_t) {
    std::vector<BaseMeasure> measures;
    measures.push_back(BaseMeasure::uniform(0.0, 1.0));
    measures.push_back(BaseMeasure::power_law(2.0, 1.0));
    measures.push_back(BaseMeasure::exponential(1.0));
    double worst = 0.0;
    for (const BaseMeasure& measure : measures) {
        double total = measure.total_mass();
        for (int i = 1; i < 200; ++i) {
            double p = static_cast<double>(i) / 200.0;
            double x = measure.quantile(p);
            worst = std::max(worst, std::abs(measure.cdf(x) - p * total) / total);
        }
    }
    return at_most("quantile_cdf_roundtrip", worst, 1e-9);
}

CheckResult check_power_law_closed_form(std::uint64_t) {
    double worst = 0.0;
    for (double a : {0.5, 1.0, 2.0}) {
        BaseMeasure measure = BaseMeasure::power_law(a, 1.0);
        for (int i = 1; i < 100; ++i) {
            double t = static_cast<double>(i) / 100.0;
            worst = std::max(worst, std::abs(measure.cdf(t) - std::pow(t, a) / a));
        }
    }
    return at_most("power_law_mass_closed_form", worst, 1e-9);
}

CheckResult check_density_sampler_ks(std::uint64_t seed) {
    BaseMeasure measure = BaseMeasure::uniform(0.0, 1.0);
    DensityParameter param;
    param.f = sinusoid(0.3, 1.0);
    param.kappa = 0.7;
    param.M = 1.3 + 1e-9;
    std::vector<double> sample = sample_from_density(measure, param, 100000, derive_key(seed, 1));
    double ks = ks_statistic(std::move(sample),
                             [](double x) { return sinusoid_cdf(0.3, 1.0, x); });
    return at_most("density_sampler_ks", ks, 1.628 / std::sqrt(1e5));
}

CheckResult check_partition_equal_mass(std::uint64_t) {
    std::vector<BaseMeasure> measures;
    measures.push_back(BaseMeasure::uniform(0.0, 1.0));
    measures.push_back(BaseMeasure::power_law(2.0, 1.0));
    measures.push_back(BaseMeasure::exponential(1.0));
    double worst = 0.0;
    for (const BaseMeasure& measure : measures) {
        QuantilePartition partition = build_partition(measure, 8);
        for (double mass : partition.cell_masses) {
            worst = std::max(worst, std::abs(mass - partition.cell_mass) / partition.cell_mass);
        }
    }
    return at_most("partition_equal_mass", worst, 1e-8);
}

CheckResult check_refinement_nesting(std::uint64_t) {
    std::vector<BaseMeasure> measures;
    measures.push_back(BaseMeasure::uniform(0.0, 1.0));
    measures.push_back(BaseMeasure::exponential(1.0));
    double worst = 0.0;
    for (const BaseMeasure& measure : measures) {
        QuantilePartition coarse = build_partition(measure, 8);
        QuantilePartition fine = build_partition(measure, 16);
        for (double v : coarse.breakpoints) {
            double best = std::numeric_limits<double>::infinity();
            for (double w : fine.breakpoints) {
                best = std::min(best, std::abs(v - w) / std::max(1.0, std::abs(v)));
            }
            worst = std::max(worst, best);
        }
    }
    return at_most("partition_refinement_nesting", worst, 1e-9);
}

CheckResult check_uniform_barycenters(std::uint64_t) {
    QuantilePartition partition = build_partition(BaseMeasure::uniform(0.0, 1.0), 16);
    double worst = 0.0;
    for (int j = 1; j <= 16; ++j) {
        double mid = (static_cast<double>(j) - 0.5) / 16.0;
        worst = std::max(worst, std::abs(partition.barycenters[static_cast<std::size_t>(j - 1)] - mid));
    }
    return at_most("uniform_barycenter_midpoints", worst, 1e-8);
}

CheckResult check_mesh_monotone(std::uint64_t) {
    std::vector<BaseMeasure> measures;
    measures.push_back(BaseMeasure::uniform(0.0, 1.0));
    measures.push_back(BaseMeasure::exponential(1.0));
    double worst = -std::numeric_limits<double>::infinity();
    for (const BaseMeasure& measure : measures) {
        double prev = std::numeric_limits<double>::infinity();
        for (int m : {4, 8, 16, 32}) {
            double mesh = build_partition(measure, m).finite_mesh;
            if (std::isfinite(prev)) {
                worst = std::max(worst, mesh - prev);
            }
            prev = mesh;
        }
    }
    return at_most("finite_mesh_monotone", worst, 1e-9);
}

CheckResult check_partition_of_unity(std::uint64_t) {
    std::vector<BaseMeasure> measures;
    measures.push_back(BaseMeasure::uniform(0.0, 1.0));
    measures.push_back(BaseMeasure::exponential(1.0));
    double worst = 0.0;
    for (const BaseMeasure& measure : measures) {
        HatBasis basis = build_hat_basis(build_partition(measure, 16));
        std::vector<double> coeffs(16, basis.partition().cell_mass);
        for (int i = 0; i < 10000; ++i) {
            double x = measure.quantile((static_cast<double>(i) + 0.5) / 10000.0);
            worst = std::max(worst, std::abs(basis.expand(coeffs, x) - 1.0));
        }
    }
    return at_most("partition_of_unity", worst, 1e-9);
}

CheckResult check_linear_interpolation_exact(std::uint64_t) {
    BaseMeasure measure = BaseMeasure::uniform(0.0, 1.0);
    auto f = [](double x) { return 0.7 + 0.6 * x; };
    QuantilePartition partition = build_partition(measure, 8);
    ApproxErrors errors = error_functionals(f, partition);
    double lo = partition.barycenters.front();
    double hi = partition.barycenters.back();
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        double x = lo + (hi - lo) * static_cast<double>(i) / 1000.0;
        worst = std::max(worst, std::abs(errors.f_hat(x) - f(x)));
    }
    return at_most("linear_density_interpolated_exactly", worst, 1e-8);
}

CheckResult check_hat_expansion_two_routes(std::uint64_t) {
    BaseMeasure measure = BaseMeasure::uniform(0.0, 1.0);
    ScalarFn f = sinusoid(0.3, 2.0);
    QuantilePartition partition = build_partition(measure, 16);
    HatBasis basis = build_hat_basis(partition);
    auto root = [&f](double x) { return std::sqrt(f(x)); };
    std::vector<double> coeffs = cell_masses(root, partition);
    PiecewiseLinearDensity direct = hat_density(coeffs, partition);
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        double x = static_cast<double>(i) / 1000.0;
        worst = std::max(worst, std::abs(basis.expand(coeffs, x) - direct(x)));
    }
    return at_most("hat_expansion_two_routes", worst, 1e-10);
}

CheckResult check_constant_zero_functionals(std::uint64_t) {
    QuantilePartition partition = build_partition(BaseMeasure::uniform(0.0, 1.0), 8);
    ApproxErrors errors = error_functionals([](double) { return 1.0; }, partition);
    double worst = std::max({errors.H, errors.A, errors.B});
    return at_most("constant_density_zero_functionals", worst, 1e-8);
}

CheckResult check_hellinger_rate_slope(std::uint64_t) {
    BaseMeasure measure = BaseMeasure::uniform(0.0, 1.0);
    ScalarFn f = sinusoid(0.3, 1.0);
    std::vector<double> ms;
    std::vector<double> hs;
    for (int m : {8, 16, 32, 64}) {
        ms.push_back(static_cast<double>(m));
        hs.push_back(error_functionals(f, build_partition(measure, m)).H);
    }
    auto fit = fit_loglog(ms, hs);
    double gap = fit ? std::abs(fit->slope + 1.5) : 1.0;
    return at_most("hellinger_functional_rate", gap, 0.2);
}

CheckResult check_multinomial_moments(std::uint64_t seed) {
    QuantilePartition partition = build_partition(BaseMeasure::uniform(0.0, 1.0), 8);
    std::vector<double> probs = cell_probabilities(sinusoid(0.3, 1.0), partition);
    const std::int64_t n = 20000;
    const int reps = 100;
    std::vector<std::vector<double>> per_cell(probs.size(), std::vector<double>());
    for (int r = 0; r < reps; ++r) {
        std::vector<std::int64_t> counts = sample_multinomial(probs, n, derive_key(seed, 1, r));
        for (std::size_t j = 0; j < probs.size(); ++j) {
            per_cell[j].push_back(static_cast<double>(counts[j]));
        }
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        SampleSummary summary = summarize(per_cell[j]);
        double mean_target = static_cast<double>(n) * probs[j];
        double var_target = mean_target * (1.0 - probs[j]);
        double mean_se = std::sqrt(var_target / reps);
        worst = std::max(worst, std::abs(summary.mean - mean_target) / mean_se);
        worst = std::max(worst, std::abs(summary.variance - var_target) / summary.var_se);
    }
    return at_most("multinomial_moments", worst, 4.0);
}

CheckResult check_grouping_chi_square(std::uint64_t seed) {
    BaseMeasure measure = BaseMeasure::uniform(0.0, 1.0);
    QuantilePartition partition = build_partition(measure, 8);
    DensityParameter param;
    param.f = sinusoid(0.3, 1.0);
    param.kappa = 0.7;
    param.M = 1.3 + 1e-9;
    std::vector<double> sample = sample_from_density(measure, param, 100000, derive_key(seed, 1));
    std::vector<std::int64_t> counts = grouping_statistic(sample, partition);
    std::vector<double> gammas = cell_probabilities(param.f, partition);
    double chi2 = 0.0;
    for (std::size_t j = 0; j < gammas.size(); ++j) {
        double expected = 1e5 * gammas[j];
        double d = static_cast<double>(counts[j]) - expected;
        chi2 += d * d / expected;
    }
    double p_value = chi_square_tail(chi2, static_cast<double>(gammas.size() - 1));
    return make_result("grouping_statistic_chi_square", p_value, 0.001, p_value >= 0.001);
}

CheckResult check_gaussian_leg_identity(std::uint64_t) {
    QuantilePartition partition = build_partition(BaseMeasure::uniform(0.0, 1.0), 8);
    ScalarFn f = sinusoid(0.3, 1.0);
    ApproxErrors errors = error_functionals(f, partition);
    const double n = 100.0;
    double root_mu = std::sqrt(partition.cell_mass);
    double lhs = 0.0;
    for (std::size_t j = 0; j < errors.masses_f.size(); ++j) {
        double term = 2.0 * std::sqrt(n * errors.masses_f[j]) -
                      2.0 * std::sqrt(n) / root_mu * errors.root_masses[j];
        lhs += term * term;
    }
    double rhs = 4.0 * n * errors.B * errors.B;
    double rel = std::abs(lhs - rhs) / rhs;
    // Same masses through the cross-module route.
    std::vector<double> gammas = cell_probabilities(f, partition);
    double mass_gap = 0.0;
    for (std::size_t j = 0; j < gammas.size(); ++j) {
        mass_gap = std::max(mass_gap, std::abs(gammas[j] - errors.masses_f[j]));
    }
    bool pass = rel <= 1e-8 && mass_gap <= 1e-9;
    return make_result("gaussian_leg_matches_root_mass_defect", std::max(rel, mass_gap), 1e-8,
                       pass);
}

CheckResult check_increments_match_path(std::uint64_t seed) {
    BaseMeasure measure = BaseMeasure::uniform(0.0, 1.0);
    ScalarFn f = sinusoid(0.3, 1.0);
    QuantilePartition partition = build_partition(measure, 4);
    GridSpec grid = GridSpec::spanning_cells(partition, 3);
    const std::int64_t n = 50;
    const int paths = 4000;
    std::vector<double> means = increment_means(f, partition);
    std::vector<std::vector<double>> per_cell(4);
    for (int p = 0; p < paths; ++p) {
        Trajectory traj = simulate_white_noise_path(f, measure, n, grid,
                                                    NoiseParametrization::nu0_time,
                                                    derive_key(seed, 1, p));
        std::vector<double> inc = extract_cell_increments(traj, partition);
        for (std::size_t j = 0; j < inc.size(); ++j) {
            per_cell[j].push_back(inc[j]);
        }
    }
    double var_target = partition.cell_mass / (4.0 * static_cast<double>(n));
    double worst = 0.0;
    for (std::size_t j = 0; j < per_cell.size(); ++j) {
        SampleSummary summary = summarize(per_cell[j]);
        worst = std::max(worst, std::abs(summary.mean - means[j]) / summary.mean_se);
        worst = std::max(worst, std::abs(summary.variance - var_target) / summary.var_se);
    }
    return at_most("cell_increments_match_path_moments", worst, 4.0);
}

CheckResult check_rescaled_unit_variance(std::uint64_t seed) {
    BaseMeasure measure = BaseMeasure::uniform(0.0, 1.0);
    ScalarFn f = sinusoid(0.3, 1.0);
    QuantilePartition partition = build_partition(measure, 4);
    const std::int64_t n = 50;
    const int reps = 2000;
    std::vector<std::vector<double>> per_cell(4);
    for (int r = 0; r < reps; ++r) {
        std::vector<double> inc = sample_increments(f, partition, n, derive_key(seed, 1, r));
        std::vector<double> scaled = rescale_increments(inc, partition, n);
        for (std::size_t j = 0; j < scaled.size(); ++j) {
            per_cell[j].push_back(scaled[j]);
        }
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < per_cell.size(); ++j) {
        SampleSummary summary = summarize(per_cell[j]);
        worst = std::max(worst, std::abs(summary.variance - 1.0) / summary.var_se);
    }
    return at_most("rescaled_increments_unit_variance", worst, 4.0);
}

CheckResult check_parametrizations_agree(std::uint64_t) {
    BaseMeasure measure = BaseMeasure::uniform(0.0, 1.0);
    ScalarFn f = sinusoid(0.3, 1.0);
    GridSpec grid = GridSpec::uniform(0.0, 1.0, 41);
    Trajectory a = simulate_white_noise_path(f, measure, 100, grid,
                                             NoiseParametrization::lebesgue_time, 0, true);
    Trajectory b = simulate_white_noise_path(f, measure, 100, grid,
                                             NoiseParametrization::nu0_time, 0, true);
    double worst = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        worst = std::max(worst, std::abs(a.values[k] - b.values[k]));
    }
    return at_most("drift_parametrizations_agree_on_uniform", worst, 1e-9);
}

CheckResult check_reconstruction_identity(std::uint64_t) {
    std::vector<BaseMeasure> measures;
    measures.push_back(BaseMeasure::uniform(0.0, 1.0));
    measures.push_back(BaseMeasure::exponential(1.0));
    double worst = 0.0;
    for (const BaseMeasure& measure : measures) {
        HatBasis basis = build_hat_basis(build_partition(measure, 16));
        double mu = basis.partition().cell_mass;
        for (int i = 1; i <= 9; ++i) {
            double s = measure.quantile(static_cast<double>(i) / 10.0);
            double acc = 0.0;
            for (int j = 1; j <= basis.size(); ++j) {
                acc += mu * basis.cumulative(j, s);
            }
            worst = std::max(worst, std::abs(acc - measure.cdf(s)));
        }
    }
    return at_most("reconstruction_partition_identity", worst, 1e-8);
}

CheckResult check_reconstruction_covariance(std::uint64_t seed) {
    BaseMeasure measure = BaseMeasure::uniform(0.0, 1.0);
    ScalarFn f = sinusoid(0.3, 1.0);
    QuantilePartition partition = build_partition(measure, 4);
    HatBasis basis = build_hat_basis(partition);
    const std::int64_t n = 50;
    GridSpec grid = GridSpec::uniform(0.0, 1.0, 21);
    YStarBuilder builder(basis, n, grid);
    const int paths = 20000;
    auto index_of = [&grid](double t) {
        for (std::size_t k = 0; k < grid.times.size(); ++k) {
            if (std::abs(grid.times[k] - t) < 1e-12) {
                return k;
            }
        }
        throw std::logic_error("grid point missing");
    };
    std::size_t i25 = index_of(0.25);
    std::size_t i50 = index_of(0.5);
    std::size_t i75 = index_of(0.75);
    std::size_t i100 = index_of(1.0);
    std::vector<double> v25(paths), v50(paths), v75(paths), v100(paths);
    for (int p = 0; p < paths; ++p) {
        std::vector<double> inc = sample_increments(f, partition, n, derive_key(seed, 1, p));
        Trajectory traj = builder.path(inc, derive_key(seed, 2, p));
        v25[static_cast<std::size_t>(p)] = traj.values[i25];
        v50[static_cast<std::size_t>(p)] = traj.values[i50];
        v75[static_cast<std::size_t>(p)] = traj.values[i75];
        v100[static_cast<std::size_t>(p)] = traj.values[i100];
    }
    double worst = 0.0;
    {
        CovSummary cov = covariance(v25, v75);
        worst = std::max(worst,
                         std::abs(cov.cov - y_star_theoretical_cov(basis, n, 0.25, 0.75)) / cov.se);
        CovSummary cov2 = covariance(v75, v100);
        worst = std::max(
            worst, std::abs(cov2.cov - y_star_theoretical_cov(basis, n, 0.75, 1.0)) / cov2.se);
    }
    {
        SampleSummary s50 = summarize(v50);
        YStarMoments th = y_star_theoretical_moments(f, basis, n, 0.5);
        worst = std::max(worst, std::abs(s50.mean - th.mean) / s50.mean_se);
        worst = std::max(worst, std::abs(s50.variance - th.variance) / s50.var_se);
        SampleSummary s25 = summarize(v25);
        YStarMoments th25 = y_star_theoretical_moments(f, basis, n, 0.25);
        worst = std::max(worst, std::abs(s25.variance - th25.variance) / s25.var_se);
    }
    return at_most("reconstruction_covariance_mc", worst, 4.0);
}

CheckResult check_reconstruction_endpoint(std::uint64_t seed) {
    BaseMeasure measure = BaseMeasure::uniform(0.0, 1.0);
    ScalarFn f = sinusoid(0.3, 1.0);
    QuantilePartition partition = build_partition(measure, 8);
    HatBasis basis = build_hat_basis(partition);
    GridSpec grid = GridSpec::uniform(0.0, 1.0, 11);
    YStarBuilder builder(basis, 100, grid);
    std::vector<double> inc = sample_increments(f, partition, 100, derive_key(seed, 1));
    Trajectory traj = builder.path(inc, derive_key(seed, 2));
    double sum = 0.0;
    for (double y : inc) {
        sum += y;
    }
    // With unit normalizations the bridges vanish at the right endpoint, so
    // the reconstruction ends exactly at the total increment.
    return at_most("reconstruction_endpoint_exact", std::abs(traj.values.back() - sum), 1e-10);
}

CheckResult check_kernel_marginal_l1(std::uint64_t seed) {
    BaseMeasure measure = BaseMeasure::uniform(0.0, 1.0);
    ScalarFn f = sinusoid(0.3, 1.0);
    QuantilePartition partition = build_partition(measure, 8);
    HatBasis basis = build_hat_basis(partition);
    KernelDiagnostics diag = cell_probability_discrepancy(f, basis);
    double total = 0.0;
    for (double mass : diag.model_cell_mass) {
        total += mass;
    }
    std::vector<double> probs(diag.model_cell_mass);
    for (double& p : probs) {
        p /= total;
    }
    const std::int64_t n = 10000;
    std::vector<std::int64_t> counts = apportion_counts(probs, n);
    const std::size_t draws = 1000000;
    std::vector<double> sample = randomization_kernel_draw(counts, basis, derive_key(seed, 1),
                                                           draws);
    const int bins = 50;
    std::vector<double> hist(bins, 0.0);
    for (double x : sample) {
        int b = std::min(bins - 1, std::max(0, static_cast<int>(x * bins)));
        hist[static_cast<std::size_t>(b)] += 1.0;
    }
    std::vector<double> coeffs(probs.size());
    for (std::size_t j = 0; j < probs.size(); ++j) {
        coeffs[j] = static_cast<double>(counts[j]) / static_cast<double>(n) /
                    basis.normalization(static_cast<int>(j) + 1);
    }
    double l1 = 0.0;
    for (int b = 0; b < bins; ++b) {
        double lo = static_cast<double>(b) / bins;
        double hi = static_cast<double>(b + 1) / bins;
        std::vector<double> edges{lo};
        for (double knot : partition.barycenters) {
            if (knot > lo && knot < hi) {
                edges.push_back(knot);
            }
        }
        edges.push_back(hi);
        double q_bin = 0.0;
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            q_bin += measure.integrate([&](double x) { return basis.expand(coeffs, x); },
                                       edges[e], edges[e + 1]);
        }
        l1 += std::abs(hist[static_cast<std::size_t>(b)] / static_cast<double>(draws) - q_bin);
    }
    return at_most("kernel_marginal_l1", l1, 0.01);
}

CheckResult check_kernel_degenerate_counts(std::uint64_t seed) {
    BaseMeasure measure = BaseMeasure::uniform(0.0, 1.0);
    QuantilePartition partition = build_partition(measure, 8);
    HatBasis basis = build_hat_basis(partition);
    std::vector<std::int64_t> counts(8, 0);
    counts[2] = 500;
    std::vector<double> sample = randomization_kernel_draw(counts, basis, derive_key(seed, 1),
                                                           2000);
    double lo = basis.support_lower(3);
    double hi = basis.support_upper(3);
    double violations = 0.0;
    for (double x : sample) {
        if (x < lo - 1e-12 || x > hi + 1e-12) {
            violations += 1.0;
        }
    }
    return at_most("kernel_degenerate_counts_support", violations, 0.0);
}

CheckResult check_l1_hellinger_piecewise(std::uint64_t seed) {
    BaseMeasure measure = BaseMeasure::uniform(0.0, 1.0);
    const int pieces = 8;
    std::vector<double> edges;
    for (int i = 1; i < pieces; ++i) {
        edges.push_back(static_cast<double>(i) / pieces);
    }
    double worst = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        RngStream stream(derive_key(seed, 1, static_cast<std::uint64_t>(trial)));
        auto random_density = [&stream]() {
            std::vector<double> values(pieces);
            double mean = 0.0;
            for (double& v : values) {
                v = 0.25 + 1.75 * stream.next_uniform();
                mean += v;
            }
            mean /= pieces;
            for (double& v : values) {
                v /= mean;
            }
            return values;
        };
        std::vector<double> pv = random_density();
        std::vector<double> qv = random_density();
        auto step_fn = [](std::vector<double> values) {
            return [values = std::move(values)](double x) {
                int idx = std::min(pieces - 1, std::max(0, static_cast<int>(x * pieces)));
                return values[static_cast<std::size_t>(idx)];
            };
        };
        double l1_closed = 0.0;
        double h2_closed = 0.0;
        for (int i = 0; i < pieces; ++i) {
            l1_closed += std::abs(pv[static_cast<std::size_t>(i)] - qv[static_cast<std::size_t>(i)]) / pieces;
            double rd = std::sqrt(pv[static_cast<std::size_t>(i)]) - std::sqrt(qv[static_cast<std::size_t>(i)]);
            h2_closed += rd * rd / pieces;
        }
        L1HellingerResult result =
            l1_and_hellinger(step_fn(pv), step_fn(qv), measure, edges, 1e-6);
        worst = std::max(worst, std::abs(result.l1.value - l1_closed));
        worst = std::max(worst, std::abs(result.hellinger_sq - h2_closed));
        worst = std::max(worst, 0.5 * result.l1.value - result.hellinger.value);
    }
    return at_most("l1_hellinger_piecewise_closed_form", worst, 1e-8);
}

std::vector<std::array<double, 4>> gaussian_battery(std::uint64_t seed, std::size_t count) {
    RngStream stream(derive_key(seed, 7));
    std::vector<std::vector<double>> points = latin_hypercube(count, 4, stream);
    std::vector<std::array<double, 4>> battery;
    battery.reserve(count);
    for (const std::vector<double>& u : points) {
        double mu1 = -2.0 + 4.0 * u[0];
        double mu2 = -2.0 + 4.0 * u[1];
        double var2 = 0.5 + 1.5 * u[2];
        double ratio = 0.5 + 1.5 * u[3];
        battery.push_back({mu1, mu2, std::sqrt(ratio * var2), std::sqrt(var2)});
    }
    return battery;
}

CheckResult check_gaussian_tv_below_bound(std::uint64_t seed) {
    double worst = -1.0;
    for (const auto& [mu1, mu2, sigma1, sigma2] : gaussian_battery(seed, 200)) {
        double exact = gaussian_tv_exact(mu1, sigma1, mu2, sigma2);
        double bound = std::min(1.0, gaussian_tv_bound(mu1, sigma1, mu2, sigma2));
        worst = std::max(worst, exact - bound);
    }
    return at_most("gaussian_tv_exact_below_bound", worst, 1e-12);
}

CheckResult check_gaussian_tv_symmetry(std::uint64_t seed) {
    double worst = 0.0;
    for (const auto& [mu1, mu2, sigma1, sigma2] : gaussian_battery(seed, 200)) {
        worst = std::max(worst, std::abs(gaussian_tv_exact(mu1, sigma1, mu2, sigma2) -
                                         gaussian_tv_exact(mu2, sigma2, mu1, sigma1)));
    }
    return at_most("gaussian_tv_symmetry", worst, 1e-12);
}

CheckResult check_mc_tv_identical(std::uint64_t seed) {
    ProductFactor factor;
    factor.sample = [](RngStream& stream) { return stream.next_normal(); };
    factor.log_p = [](double x) { return -0.5 * x * x; };
    factor.log_q = [](double x) { return -0.5 * x * x; };
    std::vector<ProductFactor> factors(3, factor);
    DivergenceResult result = tv_monte_carlo_product(factors, 10000, derive_key(seed, 1));
    return at_most("mc_tv_identical_factors_zero", result.value, 1e-12);
}

CheckResult check_mc_tv_gaussian(std::uint64_t seed) {
    ProductFactor factor;
    factor.sample = [](RngStream& stream) { return stream.next_normal(); };
    factor.log_p = [](double x) { return -0.5 * x * x; };
    factor.log_q = [](double x) { return -0.5 * (x - 1.0) * (x - 1.0); };
    DivergenceResult result = tv_monte_carlo_product({factor}, 20000, derive_key(seed, 1));
    double exact = gaussian_tv_exact(0.0, 1.0, 1.0, 1.0);
    double z = std::abs(result.value - exact) / *result.standard_error;
    return at_most("mc_tv_matches_exact_gaussian", z, 4.0);
}

CheckResult check_tensorization(std::uint64_t) {
    double worst = -1.0;
    for (double h2 : {1e-4, 1e-3, 0.01, 0.1, 0.5, 1.0}) {
        for (std::int64_t n : {1, 2, 10, 100}) {
            double exact = hellinger_tensorization_exact(h2, n);
            worst = std::max(worst, exact - static_cast<double>(n) * h2);
            if (n == 1) {
                worst = std::max(worst, std::abs(exact - h2));
            }
        }
    }
    return at_most("hellinger_tensorization_inequality", worst, 1e-12);
}

CheckResult check_product_bound_vs_closed_form(std::uint64_t seed) {
    RngStream stream(derive_key(seed, 1));
    double worst = -1.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t len = 1 + (stream.next_u64() % 5);
        std::vector<double> h2s;
        double log_bc = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
            double d = -2.0 + 4.0 * stream.next_uniform();
            h2s.push_back(gaussian_hellinger_sq(0.0, 1.0, d, 1.0));
            log_bc += -d * d / 8.0;
        }
        double h_product = std::sqrt(2.0 - 2.0 * std::exp(log_bc));
        worst = std::max(worst, h_product - hellinger_product_bound(h2s));
    }
    return at_most("product_bound_dominates_closed_form", worst, 1e-12);
}

CheckResult check_bound_terms_zero_iff(std::uint64_t) {
    QuantilePartition partition = build_partition(BaseMeasure::uniform(0.0, 1.0), 8);
    auto constant = [](double) { return 1.0; };
    double s1_const = step1_bound(constant, partition, 100);
    double s4_const = step4_bound(constant, partition, 100).total;
    double s1_sin = step1_bound(sinusoid(0.3, 1.0), partition, 100);
    bool pass = s1_const <= 1e-9 && s4_const <= 1e-9 && s1_sin > 1e-3;
    return make_result("bound_terms_zero_iff_functionals", std::max(s1_const, s4_const), 1e-9,
                       pass);
}

CheckResult check_carter_arithmetic(std::uint64_t) {
    double gap = std::abs(carter_bound(10, 10000, 1.0) - 10.0 * std::log(10.0) / 100.0) +
                 std::abs(carter_bound(2, 4, 1.0) - std::log(2.0));
    return at_most("carter_term_arithmetic", gap, 1e-12);
}

CheckResult check_corollary_golden(std::uint64_t) {
    QuantilePartition partition = build_partition(BaseMeasure::uniform(0.0, 1.0), 10);
    BoundReport report = corollary1_total(1.0, 1.0, 0.7, 1.3, partition, 10000, 1.0);
    double rel = std::abs(report.total - 22.0110020809) / 22.0110020809;
    return at_most("class_uniform_report_golden", rel, 1e-9);
}

CheckResult check_class_membership(std::uint64_t) {
    StudyConfig config = default_config();
    BaseMeasure measure = make_measure(config);
    std::vector<DensityParameter> battery = make_battery(config, measure);
    double worst_defect = 0.0;
    bool pass = true;
    for (const DensityParameter& member : battery) {
        ClassReport report = check_class_membership(member, measure);
        worst_defect = std::max(worst_defect, report.integral_defect);
        pass = pass && report.within_bounds && report.holder_ok;
    }
    return make_result("class_membership_battery", worst_defect, 1e-6,
                       pass && worst_defect <= 1e-6);
}

CheckResult check_empirical_tv_below_step1(std::uint64_t seed) {
    BaseMeasure measure = BaseMeasure::uniform(0.0, 1.0);
    ScalarFn f = sinusoid(0.3, 1.0);
    QuantilePartition partition = build_partition(measure, 16);
    ApproxErrors errors = error_functionals(f, partition);
    const int n_factors = 20;
    double step1 = std::sqrt(static_cast<double>(n_factors)) * errors.H;

    PiecewiseLinearDensity f_hat = errors.f_hat;
    ProductFactor factor;
    factor.sample = [f](RngStream& stream) {
        for (;;) {
            double x = stream.next_uniform();
            if (stream.next_uniform() * 1.3000001 <= f(x)) {
                return x;
            }
        }
    };
    factor.log_p = [f](double x) { return std::log(f(x)); };
    factor.log_q = [f_hat](double x) { return std::log(f_hat(x)); };
    std::vector<ProductFactor> factors(n_factors, factor);
    DivergenceResult result = tv_monte_carlo_product(factors, 20000, derive_key(seed, 1));
    double threshold = step1 + 3.0 * *result.standard_error;
    return make_result("empirical_tv_below_step1", result.value, threshold,
                       result.value <= threshold);
}

CheckResult check_ratio_flag(std::uint64_t) {
    GammaRatioCheck bad = gamma_ratio_check({1.0, 5.0}, 3.0);
    GammaRatioCheck good = gamma_ratio_check({1.0, 2.0}, 3.0);
    bool pass = !bad.ok && good.ok && std::abs(bad.observed - 5.0) < 1e-12;
    return make_result("probability_ratio_flag", pass ? 0.0 : 1.0, 0.0, pass);
}

std::vector<Check> all_checks() {
    return {
        {"quantile_cdf_roundtrip", check_quantile_cdf_roundtrip},
        {"power_law_mass_closed_form", check_power_law_closed_form},
        {"density_sampler_ks", check_density_sampler_ks},
        {"partition_equal_mass", check_partition_equal_mass},
        {"partition_refinement_nesting", check_refinement_nesting},
        {"uniform_barycenter_midpoints", check_uniform_barycenters},
        {"finite_mesh_monotone", check_mesh_monotone},
        {"partition_of_unity", check_partition_of_unity},
        {"linear_density_interpolated_exactly", check_linear_interpolation_exact},
        {"hat_expansion_two_routes", check_hat_expansion_two_routes},
        {"constant_density_zero_functionals", check_constant_zero_functionals},
        {"hellinger_functional_rate", check_hellinger_rate_slope},
        {"multinomial_moments", check_multinomial_moments},
        {"grouping_statistic_chi_square", check_grouping_chi_square},
        {"gaussian_leg_matches_root_mass_defect", check_gaussian_leg_identity},
        {"cell_increments_match_path_moments", check_increments_match_path},
        {"rescaled_increments_unit_variance", check_rescaled_unit_variance},
        {"drift_parametrizations_agree_on_uniform", check_parametrizations_agree},
        {"reconstruction_partition_identity", check_reconstruction_identity},
        {"reconstruction_covariance_mc", check_reconstruction_covariance},
        {"reconstruction_endpoint_exact", check_reconstruction_endpoint},
        {"kernel_marginal_l1", check_kernel_marginal_l1},
        {"kernel_degenerate_counts_support", check_kernel_degenerate_counts},
        {"l1_hellinger_piecewise_closed_form", check_l1_hellinger_piecewise},
        {"gaussian_tv_exact_below_bound", check_gaussian_tv_below_bound},
        {"gaussian_tv_symmetry", check_gaussian_tv_symmetry},
        {"mc_tv_identical_factors_zero", check_mc_tv_identical},
        {"mc_tv_matches_exact_gaussian", check_mc_tv_gaussian},
        {"hellinger_tensorization_inequality", check_tensorization},
        {"product_bound_dominates_closed_form", check_product_bound_vs_closed_form},
        {"bound_terms_zero_iff_functionals", check_bound_terms_zero_iff},
        {"carter_term_arithmetic", check_carter_arithmetic},
        {"class_uniform_report_golden", check_corollary_golden},
        {"class_membership_battery", check_class_membership},
        {"empirical_tv_below_step1", check_empirical_tv_below_step1},
        {"probability_ratio_flag", check_ratio_flag},
    };
}

}  // namespace

bool SuiteReport::all_pass() const {
    for (const CheckResult& check : checks) {
        if (!check.pass) {
            return false;
        }
    }
    return true;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
    if (count == 0) {
        return;
    }
    if (workers < 1) {
        workers = 1;
    }
    std::size_t threads = std::min(static_cast<std::size_t>(workers), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                task(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back(body);
    }
    for (std::thread& th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

void run_rate_study(const StudyConfig& config, int workers, const std::string& out_dir) {
    ensure_dir(out_dir);
    BaseMeasure measure = make_measure(config);
    std::vector<DensityParameter> battery = make_battery(config, measure);

    std::vector<int> unique_m;
    for (std::int64_t n : config.n_grid) {
        for (int m : m_schedule_for(config, n)) {
            if (std::find(unique_m.begin(), unique_m.end(), m) == unique_m.end()) {
                unique_m.push_back(m);
            }
        }
    }
    std::vector<QuantilePartition> partitions;
    partitions.reserve(unique_m.size());
    for (int m : unique_m) {
        partitions.push_back(build_partition(measure, m));
    }
    auto partition_index = [&unique_m](int m) {
        return static_cast<std::size_t>(
            std::find(unique_m.begin(), unique_m.end(), m) - unique_m.begin());
    };

    struct Cell {
        std::int64_t n = 0;
        int m = 0;
        std::size_t member = 0;
        std::size_t partition = 0;
    };
    std::vector<Cell> cells;
    for (std::int64_t n : config.n_grid) {
        for (int m : m_schedule_for(config, n)) {
            for (std::size_t k = 0; k < battery.size(); ++k) {
                cells.push_back({n, m, k, partition_index(m)});
            }
        }
    }

    struct Row {
        double h = 0, a = 0, b = 0, s1 = 0, s4 = 0, carter = 0, disc = 0, total = 0;
    };
    std::vector<Row> rows(cells.size());
    parallel_for(cells.size(), workers, [&](std::size_t i) {
        const Cell& cell = cells[i];
        ApproxErrors errors =
            error_functionals(battery[cell.member].f, partitions[cell.partition]);
        double root_n = std::sqrt(static_cast<double>(cell.n));
        Row row;
        row.h = errors.H;
        row.a = errors.A;
        row.b = errors.B;
        row.s1 = root_n * errors.H;
        row.s4 = 2.0 * root_n * (errors.A + errors.B);
        row.carter = carter_bound(cell.m, cell.n, config.c_r);
        row.disc = root_n * (errors.H + errors.A + errors.B);
        row.total = row.disc + row.carter;
        rows[i] = row;
    });

    CsvTable table;
    table.header = {"n", "m",           "member",      "H",
                    "A", "B",           "term_step1",  "term_step4",
                    "term_carter",      "term_discretization", "total"};
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& cell = cells[i];
        const Row& row = rows[i];
        table.rows.push_back(csv_row({
            csv_number(cell.n),
            csv_number(static_cast<std::int64_t>(cell.m)),
            battery[cell.member].label,
            csv_number(row.h),
            csv_number(row.a),
            csv_number(row.b),
            csv_number(row.s1),
            csv_number(row.s4),
            csv_number(row.carter),
            csv_number(row.disc),
            csv_number(row.total),
        }));
    }
    write_text_file(path_join(out_dir, "rate_study.csv"), table.serialize());

    const char* column_names[] = {"H",          "A",           "B",
                                  "term_step1", "term_step4",  "term_carter",
                                  "term_discretization",       "total"};
    auto column_value = [](const Row& row, int c) {
        switch (c) {
            case 0: return row.h;
            case 1: return row.a;
            case 2: return row.b;
            case 3: return row.s1;
            case 4: return row.s4;
            case 5: return row.carter;
            case 6: return row.disc;
            default: return row.total;
        }
    };
    std::map<std::pair<std::int64_t, int>, std::size_t> block_base;
    for (std::size_t i = 0; i < cells.size(); i += battery.size()) {
        block_base[{cells[i].n, cells[i].m}] = i;
    }

    CsvTable slopes;
    slopes.header = {"axis", "member", "column", "fixed", "slope", "intercept", "r2", "status"};
    auto emit_fit = [&](const std::string& axis, const std::string& member,
                        const std::string& column, const std::string& fixed,
                        const std::vector<double>& xs, const std::vector<double>& ys) {
        std::optional<LinearFit> fit = fit_loglog(xs, ys);
        if (fit) {
            slopes.rows.push_back(csv_row({axis, member, column, fixed, csv_number(fit->slope),
                                           csv_number(fit->intercept), csv_number(fit->r2),
                                           "ok"}));
        } else {
            double nan = std::numeric_limits<double>::quiet_NaN();
            slopes.rows.push_back(csv_row({axis, member, column, fixed, csv_number(nan),
                                           csv_number(nan), csv_number(nan), "degenerate"}));
        }
    };

    for (std::int64_t n : config.n_grid) {
        std::vector<int> schedule = m_schedule_for(config, n);
        if (schedule.size() < 2) {
            continue;
        }
        for (std::size_t k = 0; k < battery.size(); ++k) {
            for (int c = 0; c < 8; ++c) {
                std::vector<double> xs;
                std::vector<double> ys;
                for (int m : schedule) {
                    xs.push_back(static_cast<double>(m));
                    ys.push_back(column_value(rows[block_base[{n, m}] + k], c));
                }
                emit_fit("m", battery[k].label, column_names[c], csv_number(n), xs, ys);
            }
        }
    }
    if (config.n_grid.size() >= 2) {
        if (config.m_list.empty()) {
            for (std::size_t k = 0; k < battery.size(); ++k) {
                for (int c = 0; c < 8; ++c) {
                    std::vector<double> xs;
                    std::vector<double> ys;
                    for (std::int64_t n : config.n_grid) {
                        int m = m_schedule_for(config, n).front();
                        xs.push_back(static_cast<double>(n));
                        ys.push_back(column_value(rows[block_base[{n, m}] + k], c));
                    }
                    emit_fit("n", battery[k].label, column_names[c], "rule", xs, ys);
                }
            }
        } else {
            for (int m : config.m_list) {
                for (std::size_t k = 0; k < battery.size(); ++k) {
                    for (int c = 0; c < 8; ++c) {
                        std::vector<double> xs;
                        std::vector<double> ys;
                        for (std::int64_t n : config.n_grid) {
                            xs.push_back(static_cast<double>(n));
                            ys.push_back(column_value(rows[block_base[{n, m}] + k], c));
                        }
                        emit_fit("n", battery[k].label, column_names[c],
                                 csv_number(static_cast<std::int64_t>(m)), xs, ys);
                    }
                }
            }
        }
    }
    write_text_file(path_join(out_dir, "rate_slopes.csv"), slopes.serialize());
}

SuiteReport run_verification_suite(const StudyConfig& config, int workers,
                                   const std::string& out_dir) {
    ensure_dir(out_dir);
    auto start = std::chrono::steady_clock::now();
    std::vector<Check> checks = all_checks();
    std::vector<CheckResult> results(checks.size());
    parallel_for(checks.size(), workers, [&](std::size_t i) {
        std::uint64_t seed = derive_key(config.seed, 0x766b, static_cast<std::uint64_t>(i));
        try {
            results[i] = checks[i].run(seed);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "check %s threw: %s\n", checks[i].name.c_str(), e.what());
            results[i] = make_result(checks[i].name, std::numeric_limits<double>::quiet_NaN(),
                                     0.0, false);
        }
        results[i].name = checks[i].name;
    });

    SuiteReport report;
    report.checks = std::move(results);
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    CsvTable table;
    table.header = {"name", "status", "measured", "threshold"};
    for (const CheckResult& check : report.checks) {
        table.rows.push_back(csv_row({check.name, check.pass ? "pass" : "fail",
                                      csv_number(check.measured), csv_number(check.threshold)}));
    }
    write_text_file(path_join(out_dir, "verify.csv"), table.serialize());
    return report;
}

bool run_kernel_demo(const StudyConfig& config, int workers, const std::string& out_dir) {
    ensure_dir(out_dir);
    BaseMeasure measure = make_measure(config);
    std::vector<DensityParameter> battery = make_battery(config, measure);
    const DensityParameter& member = battery.front();
    QuantilePartition partition = build_partition(measure, config.demo_m);
    HatBasis basis = build_hat_basis(partition);
    std::size_t m = static_cast<std::size_t>(config.demo_m);

    KernelDiagnostics diag = cell_probability_discrepancy(member.f, basis);
    double total_model = 0.0;
    for (double mass : diag.model_cell_mass) {
        total_model += mass;
    }
    std::vector<double> probs(diag.model_cell_mass);
    for (double& p : probs) {
        p /= total_model;
    }

    {
        CsvTable counts_csv;
        counts_csv.header = {"cell_index", "count"};
        std::vector<std::int64_t> counts =
            sample_multinomial(probs, config.demo_n, derive_key(config.seed, 11));
        for (std::size_t j = 0; j < counts.size(); ++j) {
            counts_csv.rows.push_back(csv_row({csv_number(static_cast<std::int64_t>(j + 1)),
                                               csv_number(counts[j])}));
        }
        write_text_file(path_join(out_dir, "counts.csv"), counts_csv.serialize());
    }

    // Compound kernel draws: fresh multinomial counts per emitted point, so
    // the marginal law is exactly sum_j p_j u_j / w_j.
    std::vector<double> sample(config.demo_draws);
    parallel_for(config.demo_draws, workers, [&](std::size_t i) {
        std::vector<std::int64_t> counts = sample_multinomial(
            probs, config.demo_n, derive_key(config.seed, 12, static_cast<std::uint64_t>(i)));
        sample[i] = randomization_kernel_draw(
            counts, basis, derive_key(config.seed, 13, static_cast<std::uint64_t>(i)), 1)[0];
    });

    // Quadrature CDF on a dense mass grid, linearly interpolated for the KS
    // scan (the primitive is piecewise quadratic; the grid is fine enough
    // for 1e-7 interpolation error).
    const std::size_t grid_size = 4097;
    std::vector<double> grid_x(grid_size);
    std::vector<double> grid_cdf(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) {
        grid_x[i] = measure.quantile(static_cast<double>(i) / static_cast<double>(grid_size - 1));
    }
    parallel_for(grid_size, workers, [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            acc += probs[j] * basis.cumulative(static_cast<int>(j) + 1, grid_x[i]) /
                   basis.normalization(static_cast<int>(j) + 1);
        }
        grid_cdf[i] = acc;
    });
    auto cdf = [&](double t) {
        if (t <= grid_x.front()) {
            return 0.0;
        }
        if (t >= grid_x.back()) {
            return 1.0;
        }
        std::size_t hi = static_cast<std::size_t>(
            std::upper_bound(grid_x.begin(), grid_x.end(), t) - grid_x.begin());
        std::size_t lo = hi - 1;
        double span = grid_x[hi] - grid_x[lo];
        double w = span > 0.0 ? (t - grid_x[lo]) / span : 0.0;
        return grid_cdf[lo] + w * (grid_cdf[hi] - grid_cdf[lo]);
    };
    double ks = ks_statistic(sample, cdf);
    double ks_critical = 1.628 / std::sqrt(static_cast<double>(config.demo_draws));

    // Reconstruction moments against theory on a fixed grid.
    GridSpec grid = measure.interval().finite()
                        ? GridSpec::spanning_cells(partition, 4)
                        : [&measure]() {
                              GridSpec g;
                              for (int i = 1; i <= 32; ++i) {
                                  g.times.push_back(
                                      measure.quantile(static_cast<double>(i) / 33.0));
                              }
                              return g;
                          }();
    YStarBuilder builder(basis, config.demo_n, grid);
    std::size_t steps = grid.times.size();
    std::vector<std::vector<double>> values(config.demo_paths, std::vector<double>(steps));
    parallel_for(config.demo_paths, workers, [&](std::size_t p) {
        std::vector<double> inc = sample_increments(
            member.f, partition, config.demo_n,
            derive_key(config.seed, 21, static_cast<std::uint64_t>(p)));
        Trajectory traj =
            builder.path(inc, derive_key(config.seed, 22, static_cast<std::uint64_t>(p)));
        values[p] = std::move(traj.values);
    });

    CsvTable moments_csv;
    moments_csv.header = {"t",          "mc_mean",   "theory_mean", "mc_var",
                          "theory_var", "z_mean",    "z_var"};
    double max_z_mean = 0.0;
    double max_z_var = 0.0;
    std::vector<double> column(config.demo_paths);
    for (std::size_t k = 0; k < steps; ++k) {
        for (std::size_t p = 0; p < config.demo_paths; ++p) {
            column[p] = values[p][k];
        }
        SampleSummary summary = summarize(column);
        YStarMoments theory =
            y_star_theoretical_moments(member.f, basis, config.demo_n, grid.times[k]);
        double z_mean =
            summary.mean_se > 0.0 ? std::abs(summary.mean - theory.mean) / summary.mean_se : 0.0;
        double z_var = summary.var_se > 0.0
                           ? std::abs(summary.variance - theory.variance) / summary.var_se
                           : 0.0;
        max_z_mean = std::max(max_z_mean, z_mean);
        max_z_var = std::max(max_z_var, z_var);
        moments_csv.rows.push_back(csv_row({csv_number(grid.times[k]), csv_number(summary.mean),
                                            csv_number(theory.mean), csv_number(summary.variance),
                                            csv_number(theory.variance), csv_number(z_mean),
                                            csv_number(z_var)}));
    }
    write_text_file(path_join(out_dir, "ystar_moments.csv"), moments_csv.serialize());

    CsvTable path_csv;
    path_csv.header = {"t", "value"};
    for (std::size_t k = 0; k < steps; ++k) {
        path_csv.rows.push_back(csv_row({csv_number(grid.times[k]), csv_number(values[0][k])}));
    }
    write_text_file(path_join(out_dir, "ystar_path.csv"), path_csv.serialize());

    bool pass = ks <= ks_critical && max_z_mean <= 4.0 && max_z_var <= 4.0;
    CsvTable summary_csv;
    summary_csv.header = {"metric", "value"};
    auto metric = [&summary_csv](const std::string& name, double value) {
        summary_csv.rows.push_back(csv_row({name, csv_number(value)}));
    };
    metric("ks_statistic", ks);
    metric("ks_critical_1pct", ks_critical);
    metric("kernel_draws", static_cast<double>(config.demo_draws));
    metric("max_cell_discrepancy", diag.max_abs_gap);
    metric("max_normalization_defect", diag.max_normalization_defect);
    metric("ystar_max_abs_z_mean", max_z_mean);
    metric("ystar_max_abs_z_var", max_z_var);
    metric("paths", static_cast<double>(config.demo_paths));
    metric("n", static_cast<double>(config.demo_n));
    metric("m", static_cast<double>(config.demo_m));
    metric("overall_pass", pass ? 1.0 : 0.0);
    write_text_file(path_join(out_dir, "kernel_demo.csv"), summary_csv.serialize());
    return pass;
}

void run_partition_dump(const StudyConfig& config, const std::string& out_dir) {
    ensure_dir(out_dir);
    BaseMeasure measure = make_measure(config);
    QuantilePartition partition = build_partition(measure, config.demo_m);
    HatBasis basis = build_hat_basis(partition);
    CsvTable table;
    table.header = {"cell_index", "lower",         "upper",         "mass",
                    "barycenter", "support_lower", "support_upper", "normalization"};
    for (int j = 1; j <= partition.m; ++j) {
        table.rows.push_back(csv_row({
            csv_number(static_cast<std::int64_t>(j)),
            csv_number(partition.cell_lower(j)),
            csv_number(partition.cell_upper(j)),
            csv_number(partition.cell_masses[static_cast<std::size_t>(j - 1)]),
            csv_number(partition.barycenters[static_cast<std::size_t>(j - 1)]),
            csv_number(basis.support_lower(j)),
            csv_number(basis.support_upper(j)),
            csv_number(basis.normalization(j)),
        }));
    }
    write_text_file(path_join(out_dir, "partition.csv"), table.serialize());
}

void run_bounds_report(const StudyConfig& config, const std::string& out_dir) {
    ensure_dir(out_dir);
    BaseMeasure measure = make_measure(config);
    std::vector<DensityParameter> battery = make_battery(config, measure);
    CsvTable table;
    table.header = {"kind",        "n",          "m",
                    "c_r",         "term_step1", "term_step4",
                    "term_discretization",       "term_carter",
                    "total",       "ratio_ok",   "observed_ratio"};
    auto emit = [&table](const std::string& kind, const BoundReport& report) {
        table.rows.push_back(csv_row({
            kind,
            csv_number(report.n),
            csv_number(static_cast<std::int64_t>(report.m)),
            csv_number(report.c_r),
            csv_number(report.term_step1),
            csv_number(report.term_step4),
            csv_number(report.term_discretization),
            csv_number(report.term_carter),
            csv_number(report.total),
            csv_number(static_cast<std::int64_t>(report.ratio_ok ? 1 : 0)),
            csv_number(report.observed_ratio),
        }));
    };
    for (std::int64_t n : config.n_grid) {
        int m = m_schedule_for(config, n).front();
        QuantilePartition partition = build_partition(measure, m);
        emit("theorem1", theorem1_total(battery, partition, n, config.c_r));
    }
    if (measure.interval().finite()) {
        std::int64_t n = config.n_grid.back();
        int m = m_schedule_for(config, n).front();
        QuantilePartition partition = build_partition(measure, m);
        emit("corollary1", corollary1_total(config.class_gamma, config.class_k,
                                            config.class_kappa, config.class_m, partition, n,
                                            config.c_r));
    }
    write_text_file(path_join(out_dir, "bounds.csv"), table.serialize());
}

}  // namespace lecam
