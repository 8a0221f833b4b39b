#include "lecam/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lecam/rng.hpp"

namespace lecam {

namespace {

constexpr double kProbSumTol = 1e-8;

// Domain tags keeping the per-draw RNG streams of different samplers disjoint
// even when they share a seed.
constexpr std::uint64_t kTagMultinomial = 0x6d756c7469ULL;
constexpr std::uint64_t kTagGaussianVec = 0x67617573ULL;
constexpr std::uint64_t kTagIncrements = 0x696e6372ULL;
constexpr std::uint64_t kTagPath = 0x70617468ULL;

std::vector<double> cumulative_from(const std::vector<double>& probabilities) {
    double total = 0.0;
    for (double p : probabilities) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument(
                "sample_multinomial: probabilities must be finite and nonnegative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > kProbSumTol) {
        throw std::invalid_argument("sample_multinomial: probabilities sum to " +
                                    std::to_string(total) + ", outside 1 +/- 1e-8");
    }
    std::vector<double> cum(probabilities.size());
    double run = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        run += probabilities[i] / total;
        cum[i] = run;
    }
    cum.back() = 1.0;
    return cum;
}

}  // namespace

GridSpec GridSpec::uniform(double lo, double hi, std::size_t count) {
    if (!(lo < hi) || count < 2) {
        throw std::invalid_argument("GridSpec::uniform: need lo < hi and at least two points");
    }
    GridSpec grid;
    grid.times.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        double s = static_cast<double>(i) / static_cast<double>(count - 1);
        grid.times[i] = lo + s * (hi - lo);
    }
    grid.times.front() = lo;
    grid.times.back() = hi;
    return grid;
}

GridSpec GridSpec::spanning_cells(const QuantilePartition& partition, std::size_t per_cell) {
    const IntervalSpec& interval = partition.measure.interval();
    if (!interval.finite()) {
        throw std::invalid_argument("GridSpec::spanning_cells: interval must be bounded");
    }
    if (per_cell == 0) {
        throw std::invalid_argument("GridSpec::spanning_cells: per_cell must be positive");
    }
    GridSpec grid;
    std::vector<double> edges;
    edges.push_back(interval.lower);
    for (double v : partition.breakpoints) {
        edges.push_back(v);
    }
    edges.push_back(interval.upper);
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        double lo = edges[k];
        double hi = edges[k + 1];
        for (std::size_t i = 0; i < per_cell; ++i) {
            double s = static_cast<double>(i) / static_cast<double>(per_cell);
            grid.times.push_back(lo + s * (hi - lo));
        }
    }
    grid.times.push_back(interval.upper);
    grid.times.erase(std::unique(grid.times.begin(), grid.times.end()), grid.times.end());
    grid.validate(interval);
    return grid;
}

void GridSpec::validate(const IntervalSpec& interval) const {
    if (times.size() < 2) {
        throw std::invalid_argument("GridSpec: need at least two grid points");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) {
            throw std::invalid_argument("GridSpec: grid points must be finite");
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw std::invalid_argument("GridSpec: grid points must be strictly increasing");
        }
        if (times[i] < interval.lower || times[i] > interval.upper) {
            throw std::invalid_argument("GridSpec: grid point outside the interval closure");
        }
    }
}

std::vector<double> cell_probabilities(const ScalarFn& f, const QuantilePartition& partition) {
    std::vector<double> gammas(static_cast<std::size_t>(partition.m));
    for (int j = 1; j <= partition.m; ++j) {
        double value =
            partition.measure.integrate(f, partition.cell_lower(j), partition.cell_upper(j));
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw std::runtime_error("cell_probabilities: cell " + std::to_string(j) +
                                     " has nonpositive mass " + std::to_string(value));
        }
        gammas[static_cast<std::size_t>(j - 1)] = value;
    }
    return gammas;
}

std::vector<std::int64_t> sample_multinomial(const std::vector<double>& probabilities,
                                             std::int64_t n, std::uint64_t seed) {
    if (probabilities.empty() || n < 0) {
        throw std::invalid_argument("sample_multinomial: need probabilities and n >= 0");
    }
    std::vector<double> cum = cumulative_from(probabilities);
    std::vector<std::int64_t> counts(probabilities.size(), 0);
    for (std::int64_t i = 0; i < n; ++i) {
        RngStream stream(derive_key(seed, kTagMultinomial, static_cast<std::uint64_t>(i)));
        double u = stream.next_uniform();
        std::size_t idx =
            static_cast<std::size_t>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        if (idx >= counts.size()) {
            idx = counts.size() - 1;
        }
        ++counts[idx];
    }
    return counts;
}

std::vector<double> sample_gaussian_vector(const std::vector<double>& gammas, std::int64_t n,
                                           std::uint64_t seed) {
    if (n <= 0) {
        throw std::invalid_argument("sample_gaussian_vector: n must be positive");
    }
    std::vector<double> out(gammas.size());
    for (std::size_t j = 0; j < gammas.size(); ++j) {
        if (!(gammas[j] >= 0.0)) {
            throw std::invalid_argument("sample_gaussian_vector: gammas must be nonnegative");
        }
        RngStream stream(derive_key(seed, kTagGaussianVec, static_cast<std::uint64_t>(j)));
        out[j] = std::sqrt(static_cast<double>(n) * gammas[j]) + 0.5 * stream.next_normal();
    }
    return out;
}

std::vector<double> increment_means(const ScalarFn& f, const QuantilePartition& partition) {
    std::vector<double> means(static_cast<std::size_t>(partition.m));
    auto root = [&f](double x) { return std::sqrt(std::max(0.0, f(x))); };
    for (int j = 1; j <= partition.m; ++j) {
        means[static_cast<std::size_t>(j - 1)] =
            partition.measure.integrate(root, partition.cell_lower(j), partition.cell_upper(j));
    }
    return means;
}

std::vector<double> sample_increments(const ScalarFn& f, const QuantilePartition& partition,
                                      std::int64_t n, std::uint64_t seed) {
    if (n <= 0) {
        throw std::invalid_argument("sample_increments: n must be positive");
    }
    std::vector<double> means = increment_means(f, partition);
    double sd = std::sqrt(partition.cell_mass / (4.0 * static_cast<double>(n)));
    for (std::size_t j = 0; j < means.size(); ++j) {
        RngStream stream(derive_key(seed, kTagIncrements, static_cast<std::uint64_t>(j)));
        means[j] += sd * stream.next_normal();
    }
    return means;
}

std::vector<double> rescale_increments(const std::vector<double>& increments,
                                       const QuantilePartition& partition, std::int64_t n) {
    if (n <= 0) {
        throw std::invalid_argument("rescale_increments: n must be positive");
    }
    double factor = 2.0 * std::sqrt(static_cast<double>(n)) / std::sqrt(partition.cell_mass);
    std::vector<double> out(increments.size());
    for (std::size_t j = 0; j < increments.size(); ++j) {
        out[j] = factor * increments[j];
    }
    return out;
}

std::vector<double> unscale_increments(const std::vector<double>& rescaled,
                                       const QuantilePartition& partition, std::int64_t n) {
    if (n <= 0) {
        throw std::invalid_argument("unscale_increments: n must be positive");
    }
    double factor = std::sqrt(partition.cell_mass) / (2.0 * std::sqrt(static_cast<double>(n)));
    std::vector<double> out(rescaled.size());
    for (std::size_t j = 0; j < rescaled.size(); ++j) {
        out[j] = factor * rescaled[j];
    }
    return out;
}

Trajectory simulate_white_noise_path(const ScalarFn& f, const BaseMeasure& measure,
                                     std::int64_t n, const GridSpec& grid,
                                     NoiseParametrization parametrization, std::uint64_t seed,
                                     bool noise_suppressed) {
    if (n <= 0) {
        throw std::invalid_argument("simulate_white_noise_path: n must be positive");
    }
    grid.validate(measure.interval());
    Trajectory trajectory;
    trajectory.times = grid.times;
    trajectory.values.assign(grid.times.size(), 0.0);

    auto root_f = [&f](double x) { return std::sqrt(std::max(0.0, f(x))); };
    double running = 0.0;
    for (std::size_t k = 0; k + 1 < grid.times.size(); ++k) {
        double lo = grid.times[k];
        double hi = grid.times[k + 1];
        double drift = 0.0;
        double variance = 0.0;
        if (parametrization == NoiseParametrization::lebesgue_time) {
            auto integrand = [&](double x) { return std::sqrt(std::max(0.0, f(x) * measure.g(x))); };
            drift = integrate_adaptive(integrand, lo, hi, measure.quad_config()).value;
            variance = (hi - lo) / (4.0 * static_cast<double>(n));
        } else {
            drift = measure.integrate(root_f, lo, hi);
            variance = (measure.cdf(hi) - measure.cdf(lo)) / (4.0 * static_cast<double>(n));
        }
        double noise = 0.0;
        if (!noise_suppressed) {
            RngStream stream(derive_key(seed, kTagPath, static_cast<std::uint64_t>(k)));
            noise = std::sqrt(variance) * stream.next_normal();
        }
        running += drift + noise;
        trajectory.values[k + 1] = running;
    }
    return trajectory;
}

std::vector<double> extract_cell_increments(const Trajectory& trajectory,
                                            const QuantilePartition& partition) {
    const IntervalSpec& interval = partition.measure.interval();
    if (!interval.finite()) {
        throw std::invalid_argument("extract_cell_increments: interval must be bounded");
    }
    if (trajectory.times.size() != trajectory.values.size() || trajectory.times.size() < 2) {
        throw std::invalid_argument("extract_cell_increments: malformed trajectory");
    }
    double scale = std::max({1.0, std::abs(interval.lower), std::abs(interval.upper)});
    double tol = 1e-9 * scale;

    std::vector<double> edges;
    edges.push_back(interval.lower);
    for (double v : partition.breakpoints) {
        edges.push_back(v);
    }
    edges.push_back(interval.upper);

    std::vector<std::size_t> edge_index(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        auto it =
            std::lower_bound(trajectory.times.begin(), trajectory.times.end(), edges[e] - tol);
        if (it == trajectory.times.end() || std::abs(*it - edges[e]) > tol) {
            throw std::invalid_argument("extract_cell_increments: grid misses breakpoint " +
                                        std::to_string(edges[e]));
        }
        edge_index[e] = static_cast<std::size_t>(it - trajectory.times.begin());
    }
    std::vector<double> increments(static_cast<std::size_t>(partition.m));
    for (std::size_t j = 0; j < increments.size(); ++j) {
        increments[j] = trajectory.values[edge_index[j + 1]] - trajectory.values[edge_index[j]];
    }
    return increments;
}

}  // namespace lecam
