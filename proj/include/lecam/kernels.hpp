#pragma once

#include <cstdint>
#include <vector>

#include "lecam/approximation.hpp"
#include "lecam/experiments.hpp"

namespace lecam {

/// Counts how many observations land in each partition cell. Throws
/// std::domain_error if an observation lies outside the interval closure.
std::vector<std::int64_t> grouping_statistic(const std::vector<double>& samples,
                                             const QuantilePartition& partition);

/// Draws i.i.d. points from the density (1/n) sum_j k_j u_j with respect to
/// the base measure, where k_j are the given cell counts with sum n. Each
/// draw picks a cell proportionally to its count and then samples the hat
/// element by rejection in mass coordinates. `draws == 0` means n draws.
std::vector<double> randomization_kernel_draw(const std::vector<std::int64_t>& counts,
                                              const HatBasis& basis, std::uint64_t seed,
                                              std::size_t draws = 0);

/// Gap between the hat-smoothed model and the target cell masses.
struct KernelDiagnostics {
    std::vector<double> model_cell_mass;   ///< int_{J_j} f_hat dnu0
    std::vector<double> target_cell_mass;  ///< int_{J_j} f dnu0
    double max_abs_gap = 0.0;
    double max_normalization_defect = 0.0;
};

KernelDiagnostics cell_probability_discrepancy(const ScalarFn& f, const HatBasis& basis);

/// Reconstructs a continuous-path observation from cell increments:
///   Y*(t) = sum_j Ybar_j F_j(t) + (1 / (2 sqrt n)) sum_j sqrt(mu) B_j(t)
/// with F_j the hat-element primitive and B_j an independent Brownian bridge
/// run in the normalized time F_j(t) / w_j. Precomputes F_j on the grid once
/// so repeated paths only cost Gaussian draws.
class YStarBuilder {
public:
    YStarBuilder(const HatBasis& basis, std::int64_t n, GridSpec grid);

    /// One reconstruction for the given cell increments; the bridge noise is
    /// keyed by (seed, cell, step) so a path is reproducible in isolation.
    Trajectory path(const std::vector<double>& increments, std::uint64_t seed) const;

    /// Drift-only reconstruction (all bridges suppressed).
    Trajectory mean_path(const std::vector<double>& increments) const;

    const GridSpec& grid() const { return grid_; }
    const HatBasis& basis() const { return *basis_; }
    std::int64_t n() const { return n_; }

    /// F_j(t_k) for cell j (1-based) at grid index k.
    double primitive(std::size_t j, std::size_t k) const { return primitives_[j - 1][k]; }

private:
    const HatBasis* basis_;
    std::int64_t n_ = 0;
    GridSpec grid_;
    std::vector<std::vector<double>> primitives_;
    std::vector<double> normalizations_;
};

/// Samples increments from the signal sqrt(f) and reconstructs in one call.
Trajectory build_y_star_path(const ScalarFn& f, const HatBasis& basis, std::int64_t n,
                             const GridSpec& grid, std::uint64_t seed);

struct YStarMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Exact mean and variance of Y*(t). When every w_j equals one the variance
/// telescopes to nu0(I intersect (-inf, t]) / (4n), the white-noise value.
YStarMoments y_star_theoretical_moments(const ScalarFn& f, const HatBasis& basis,
                                        std::int64_t n, double t);

/// Exact Cov(Y*(s), Y*(t)).
double y_star_theoretical_cov(const HatBasis& basis, std::int64_t n, double s, double t);

}  // namespace lecam
