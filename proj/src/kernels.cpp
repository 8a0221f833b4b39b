#include "lecam/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lecam/rng.hpp"

namespace lecam {

namespace {

constexpr std::uint64_t kTagKernel = 0x6b65726eULL;
constexpr std::uint64_t kTagBridge = 0x62726467ULL;
constexpr int kMaxProposals = 100000;

}  // namespace

std::vector<std::int64_t> grouping_statistic(const std::vector<double>& samples,
                                             const QuantilePartition& partition) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(partition.m), 0);
    for (double x : samples) {
        ++counts[static_cast<std::size_t>(locate_cell(partition, x) - 1)];
    }
    return counts;
}

std::vector<double> randomization_kernel_draw(const std::vector<std::int64_t>& counts,
                                              const HatBasis& basis, std::uint64_t seed,
                                              std::size_t draws) {
    std::size_t m = static_cast<std::size_t>(basis.size());
    if (counts.size() != m) {
        throw std::invalid_argument("randomization_kernel_draw: counts size must match the basis");
    }
    std::int64_t n = 0;
    for (std::int64_t k : counts) {
        if (k < 0) {
            throw std::invalid_argument("randomization_kernel_draw: negative count");
        }
        n += k;
    }
    if (n <= 0) {
        throw std::invalid_argument("randomization_kernel_draw: counts sum to zero");
    }
    if (draws == 0) {
        draws = static_cast<std::size_t>(n);
    }

    std::vector<double> cum(m);
    double run = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        run += static_cast<double>(counts[j]) / static_cast<double>(n);
        cum[j] = run;
    }
    cum.back() = 1.0;

    // Mass coordinates of each element's support, so proposals are exact
    // base-measure draws restricted to the support.
    const BaseMeasure& measure = basis.measure();
    std::vector<double> mass_lo(m);
    std::vector<double> mass_hi(m);
    for (std::size_t j = 0; j < m; ++j) {
        mass_lo[j] = measure.cdf(basis.support_lower(static_cast<int>(j) + 1));
        mass_hi[j] = measure.cdf(basis.support_upper(static_cast<int>(j) + 1));
    }

    double mu = basis.partition().cell_mass;
    std::vector<double> out(draws);
    for (std::size_t i = 0; i < draws; ++i) {
        RngStream stream(derive_key(seed, kTagKernel, static_cast<std::uint64_t>(i)));
        double u = stream.next_uniform();
        std::size_t j =
            static_cast<std::size_t>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        if (j >= m) {
            j = m - 1;
        }
        if (counts[j] == 0) {
            // Ties in the cumulative weights can land on an empty cell; move
            // to the nearest populated one.
            std::size_t down = j;
            while (down > 0 && counts[down] == 0) {
                --down;
            }
            if (counts[down] > 0) {
                j = down;
            } else {
                while (j + 1 < m && counts[j] == 0) {
                    ++j;
                }
            }
        }
        bool accepted = false;
        for (int attempt = 0; attempt < kMaxProposals; ++attempt) {
            double c = mass_lo[j] + stream.next_uniform() * (mass_hi[j] - mass_lo[j]);
            double x = measure.quantile_of_mass(c);
            if (stream.next_uniform() <= basis.value(static_cast<int>(j) + 1, x) * mu) {
                out[i] = x;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            throw std::runtime_error(
                "randomization_kernel_draw: rejection sampler exceeded 100000 proposals for one "
                "draw; the hat element acceptance rate should be near mu w_j / nu0(supp u_j)");
        }
    }
    return out;
}

KernelDiagnostics cell_probability_discrepancy(const ScalarFn& f, const HatBasis& basis) {
    const QuantilePartition& partition = basis.partition();
    std::vector<double> masses = cell_masses(f, partition);
    PiecewiseLinearDensity f_hat = hat_density(masses, partition);

    KernelDiagnostics diag;
    diag.model_cell_mass.resize(masses.size());
    diag.target_cell_mass = masses;
    for (int j = 1; j <= partition.m; ++j) {
        double lo = partition.cell_lower(j);
        double hi = partition.cell_upper(j);
        std::vector<double> edges;
        edges.push_back(lo);
        for (double knot : f_hat.knots) {
            if (knot > lo && knot < hi) {
                edges.push_back(knot);
            }
        }
        edges.push_back(hi);
        double model = 0.0;
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            model += partition.measure.integrate([&f_hat](double x) { return f_hat(x); },
                                                 edges[e], edges[e + 1]);
        }
        diag.model_cell_mass[static_cast<std::size_t>(j - 1)] = model;
        diag.max_abs_gap =
            std::max(diag.max_abs_gap, std::abs(model - masses[static_cast<std::size_t>(j - 1)]));
    }
    diag.max_normalization_defect = basis.max_normalization_defect();
    return diag;
}

YStarBuilder::YStarBuilder(const HatBasis& basis, std::int64_t n, GridSpec grid)
    : basis_(&basis), n_(n), grid_(std::move(grid)) {
    if (n_ <= 0) {
        throw std::invalid_argument("YStarBuilder: n must be positive");
    }
    grid_.validate(basis.measure().interval());
    std::size_t m = static_cast<std::size_t>(basis.size());
    primitives_.assign(m, std::vector<double>(grid_.times.size(), 0.0));
    normalizations_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < grid_.times.size(); ++k) {
            primitives_[j][k] = basis.cumulative(static_cast<int>(j) + 1, grid_.times[k]);
        }
        normalizations_[j] = basis.normalization(static_cast<int>(j) + 1);
        if (!(normalizations_[j] > 0.0)) {
            throw std::runtime_error("YStarBuilder: hat element has nonpositive normalization");
        }
    }
}

Trajectory YStarBuilder::mean_path(const std::vector<double>& increments) const {
    if (increments.size() != primitives_.size()) {
        throw std::invalid_argument("YStarBuilder: increments size must match the basis");
    }
    Trajectory trajectory;
    trajectory.times = grid_.times;
    trajectory.values.assign(grid_.times.size(), 0.0);
    for (std::size_t k = 0; k < grid_.times.size(); ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < increments.size(); ++j) {
            acc += increments[j] * primitives_[j][k];
        }
        trajectory.values[k] = acc;
    }
    return trajectory;
}

Trajectory YStarBuilder::path(const std::vector<double>& increments, std::uint64_t seed) const {
    Trajectory trajectory = mean_path(increments);
    std::size_t m = primitives_.size();
    double root_mu = std::sqrt(basis_->partition().cell_mass);
    double scale = root_mu / (2.0 * std::sqrt(static_cast<double>(n_)));

    std::size_t steps = grid_.times.size();
    std::vector<double> wiener(steps);
    for (std::size_t j = 0; j < m; ++j) {
        double w = normalizations_[j];
        // Brownian motion sampled at the normalized times s_k = F_j(t_k)/w_j,
        // then tied down at s = 1. One Gaussian is consumed per grid step
        // even when the step is degenerate, keeping the draw schedule fixed.
        double prev_s = 0.0;
        double level = 0.0;
        for (std::size_t k = 0; k < steps; ++k) {
            double s = std::min(1.0, std::max(0.0, primitives_[j][k] / w));
            RngStream stream(derive_key(seed, kTagBridge, (static_cast<std::uint64_t>(j) << 32) |
                                                              static_cast<std::uint64_t>(k)));
            double z = stream.next_normal();
            double ds = s - prev_s;
            if (ds > 0.0) {
                level += std::sqrt(ds) * z;
            }
            wiener[k] = level;
            prev_s = s;
        }
        double terminal = wiener[steps - 1];
        double s_terminal = std::min(1.0, std::max(0.0, primitives_[j][steps - 1] / w));
        if (s_terminal < 1.0) {
            // Extend the motion to s = 1 so the bridge is pinned at the true
            // support endpoint even when the grid stops short of it.
            RngStream stream(derive_key(seed, kTagBridge, (static_cast<std::uint64_t>(j) << 32) |
                                                              static_cast<std::uint64_t>(steps)));
            terminal += std::sqrt(1.0 - s_terminal) * stream.next_normal();
        }
        for (std::size_t k = 0; k < steps; ++k) {
            double s = std::min(1.0, std::max(0.0, primitives_[j][k] / w));
            double bridge = wiener[k] - s * terminal;
            trajectory.values[k] += scale * bridge;
        }
    }
    return trajectory;
}

Trajectory build_y_star_path(const ScalarFn& f, const HatBasis& basis, std::int64_t n,
                             const GridSpec& grid, std::uint64_t seed) {
    std::vector<double> increments = sample_increments(f, basis.partition(), n, seed);
    YStarBuilder builder(basis, n, grid);
    return builder.path(increments, derive_key(seed, kTagBridge, 0));
}

YStarMoments y_star_theoretical_moments(const ScalarFn& f, const HatBasis& basis,
                                        std::int64_t n, double t) {
    if (n <= 0) {
        throw std::invalid_argument("y_star_theoretical_moments: n must be positive");
    }
    const QuantilePartition& partition = basis.partition();
    std::vector<double> means = increment_means(f, partition);
    double mu = partition.cell_mass;
    YStarMoments moments;
    for (int j = 1; j <= basis.size(); ++j) {
        double fj = basis.cumulative(j, t);
        double w = basis.normalization(j);
        double s = std::min(1.0, std::max(0.0, fj / w));
        moments.mean += means[static_cast<std::size_t>(j - 1)] * fj;
        moments.variance += (mu / (4.0 * static_cast<double>(n))) * (fj * fj + s * (1.0 - s));
    }
    return moments;
}

double y_star_theoretical_cov(const HatBasis& basis, std::int64_t n, double s, double t) {
    if (n <= 0) {
        throw std::invalid_argument("y_star_theoretical_cov: n must be positive");
    }
    double lo = std::min(s, t);
    double hi = std::max(s, t);
    const QuantilePartition& partition = basis.partition();
    double mu = partition.cell_mass;
    double cov = 0.0;
    for (int j = 1; j <= basis.size(); ++j) {
        double f_lo = basis.cumulative(j, lo);
        double f_hi = basis.cumulative(j, hi);
        double w = basis.normalization(j);
        double s_lo = std::min(1.0, std::max(0.0, f_lo / w));
        double s_hi = std::min(1.0, std::max(0.0, f_hi / w));
        cov += (mu / (4.0 * static_cast<double>(n))) * (f_lo * f_hi + s_lo * (1.0 - s_hi));
    }
    return cov;
}

}  // namespace lecam
