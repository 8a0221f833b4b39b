#include "lecam/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lecam {

double QuantilePartition::cell_lower(int j) const {
    if (j < 1 || j > m) throw std::out_of_range("cell_lower: cell index");
    return j == 1 ? measure.interval().lower : breakpoints[static_cast<std::size_t>(j) - 2];
}

double QuantilePartition::cell_upper(int j) const {
    if (j < 1 || j > m) throw std::out_of_range("cell_upper: cell index");
    return j == m ? measure.interval().upper : breakpoints[static_cast<std::size_t>(j) - 1];
}

QuantilePartition build_partition(const BaseMeasure& measure, int m) {
    if (m < 2) throw std::invalid_argument("build_partition: m must be at least 2");
    const double mass = measure.total_mass();
    const double mu = mass / static_cast<double>(m);
    const double floor = 100.0 * measure.quad_config().abs_tol;
    if (mu < floor) {
        const int max_m = static_cast<int>(mass / floor);
        throw std::invalid_argument(
            "build_partition: cell mass " + std::to_string(mu) +
            " under-resolves the quadrature tolerance; largest admissible m is " +
            std::to_string(max_m));
    }

    QuantilePartition p{measure, m, mu, {}, {}, {}, {}, 0.0};
    p.breakpoints.resize(static_cast<std::size_t>(m) - 1);
    p.cdf_at_breakpoints.resize(static_cast<std::size_t>(m) - 1);
    for (int j = 1; j < m; ++j) {
        const double v = measure.quantile_of_mass(mu * static_cast<double>(j));
        p.breakpoints[static_cast<std::size_t>(j) - 1] = v;
        p.cdf_at_breakpoints[static_cast<std::size_t>(j) - 1] = measure.cdf(v);
    }
    for (int j = 1; j + 1 < m; ++j) {
        if (!(p.breakpoints[static_cast<std::size_t>(j)] >=
              p.breakpoints[static_cast<std::size_t>(j) - 1]))
            throw std::runtime_error("build_partition: breakpoints not monotone");
    }

    // realized masses telescope the cached CDF values
    p.cell_masses.resize(static_cast<std::size_t>(m));
    for (int j = 1; j <= m; ++j) {
        const double lo_cdf = j == 1 ? 0.0 : p.cdf_at_breakpoints[static_cast<std::size_t>(j) - 2];
        const double hi_cdf =
            j == m ? mass : p.cdf_at_breakpoints[static_cast<std::size_t>(j) - 1];
        p.cell_masses[static_cast<std::size_t>(j) - 1] = hi_cdf - lo_cdf;
    }

    p.barycenters.resize(static_cast<std::size_t>(m));
    for (int j = 1; j <= m; ++j) {
        const double lo = p.cell_lower(j);
        const double hi = p.cell_upper(j);
        const double first_moment = measure.integrate([](double x) { return x; }, lo, hi);
        const double bary = first_moment / p.cell_masses[static_cast<std::size_t>(j) - 1];
        if (!std::isfinite(bary))
            throw std::runtime_error(
                "build_partition: cell barycenter is not finite (first moment of nu0 "
                "diverges on an unbounded cell)");
        p.barycenters[static_cast<std::size_t>(j) - 1] = bary;
    }
    for (int j = 1; j < m; ++j) {
        if (!(p.barycenters[static_cast<std::size_t>(j)] >
              p.barycenters[static_cast<std::size_t>(j) - 1]))
            throw std::runtime_error("build_partition: barycenters not strictly increasing");
    }

    p.finite_mesh = 0.0;
    for (int j = 1; j <= m; ++j) {
        const double lo = p.cell_lower(j);
        const double hi = p.cell_upper(j);
        if (std::isfinite(lo) && std::isfinite(hi))
            p.finite_mesh = std::max(p.finite_mesh, hi - lo);
    }
    return p;
}

int locate_cell(const QuantilePartition& partition, double x) {
    if (std::isnan(x) || !partition.measure.interval().contains(x))
        throw std::domain_error("locate_cell: point outside the interval");
    const auto& v = partition.breakpoints;
    const auto it = std::lower_bound(v.begin(), v.end(), x);
    return static_cast<int>(it - v.begin()) + 1;
}

}  // namespace lecam
