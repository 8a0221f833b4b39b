#pragma once

#include <cstdint>
#include <vector>

#include "lecam/partition.hpp"

namespace lecam {

/// Time grid for path simulation. Strictly increasing, inside the closure of
/// the interval. Increment extraction additionally requires the grid to
/// contain every partition breakpoint and both endpoints.
struct GridSpec {
    std::vector<double> times;

    static GridSpec uniform(double lo, double hi, std::size_t count);
    /// Endpoints, breakpoints, and `per_cell - 1` equal-width interior points
    /// per cell; requires a bounded interval.
    static GridSpec spanning_cells(const QuantilePartition& partition, std::size_t per_cell);
    void validate(const IntervalSpec& interval) const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> values;
};

/// Which time scale carries the noise:
///   lebesgue_time: dY = sqrt(f g) dt + dW / (2 sqrt n)
///   nu0_time:      dY = sqrt(f) g dt + sqrt(g) dW / (2 sqrt n)
/// Increments over [s, t] are Gaussian with variance (t - s) / (4n) in the
/// first form and nu0((s, t]) / (4n) in the second.
enum class NoiseParametrization { lebesgue_time, nu0_time };

/// Cell probabilities gamma_j = int_{J_j} f dnu0; rejects nonpositive cells.
std::vector<double> cell_probabilities(const ScalarFn& f, const QuantilePartition& partition);

/// One multinomial count vector with n trials. Probabilities may be off by
/// at most 1e-8 from summing to one and are renormalized internally.
std::vector<std::int64_t> sample_multinomial(const std::vector<double>& probabilities,
                                             std::int64_t n, std::uint64_t seed);

/// Independent coordinates N(sqrt(n gamma_j), 1/4).
std::vector<double> sample_gaussian_vector(const std::vector<double>& gammas, std::int64_t n,
                                           std::uint64_t seed);

/// Expected cell increments int_{J_j} sqrt f dnu0 (the drift of the
/// nu0-time form over each cell).
std::vector<double> increment_means(const ScalarFn& f, const QuantilePartition& partition);

/// Independent cell increments N(int_{J_j} sqrt f dnu0, mu / (4n)).
std::vector<double> sample_increments(const ScalarFn& f, const QuantilePartition& partition,
                                      std::int64_t n, std::uint64_t seed);

/// Multiplies by 2 sqrt(n) / sqrt(mu), mapping cell increments onto the
/// unit-variance Gaussian vector scale; unscale_increments inverts it.
std::vector<double> rescale_increments(const std::vector<double>& increments,
                                       const QuantilePartition& partition, std::int64_t n);
std::vector<double> unscale_increments(const std::vector<double>& rescaled,
                                       const QuantilePartition& partition, std::int64_t n);

/// Path on the grid with Y(t_0) = 0 and independent Gaussian increments per
/// step (drift by quadrature, noise per the parametrization). Suppressing
/// noise returns the drift path.
Trajectory simulate_white_noise_path(const ScalarFn& f, const BaseMeasure& measure,
                                     std::int64_t n, const GridSpec& grid,
                                     NoiseParametrization parametrization, std::uint64_t seed,
                                     bool noise_suppressed = false);

/// Sums grid increments between consecutive breakpoints. The grid must cover
/// the whole (bounded) interval and hit every breakpoint within tolerance.
std::vector<double> extract_cell_increments(const Trajectory& trajectory,
                                            const QuantilePartition& partition);

/// One draw from any of the model forms, tagged for CSV export.
struct ExperimentDraw {
    enum class Kind {
        density_sample,
        multinomial_counts,
        gaussian_vector,
        cell_increments,
        white_noise_path
    };
    Kind kind = Kind::density_sample;
    std::vector<double> values;
    std::vector<std::int64_t> counts;
    Trajectory trajectory;
    std::int64_t n = 0;
    std::uint64_t seed = 0;
};

}  // namespace lecam
