#pragma once

#include <vector>

#include "lecam/measure.hpp"

namespace lecam {

/// Equal-mass quantile partition of I into m cells under nu0. Cells follow
/// the closed-on-the-right convention: J_1 = I cut at v_1, interior cells
/// (v_{j-1}, v_j], and J_m runs to the upper endpoint; each breakpoint v_j
/// belongs to J_j. The owning measure travels with the partition so that
/// downstream constructions can integrate against nu0.
struct QuantilePartition {
    BaseMeasure measure;
    int m = 0;
    double cell_mass = 0.0;  // mu = nu0(I) / m, the common target mass
    std::vector<double> breakpoints;          // v_1 .. v_{m-1}
    std::vector<double> cdf_at_breakpoints;   // nu0 up to each v_j
    std::vector<double> cell_masses;          // realized nu0(J_j), telescoped
    std::vector<double> barycenters;          // x_j* = int_{J_j} x dnu0 / nu0(J_j)
    double finite_mesh = 0.0;  // max width over cells with finite endpoints

    double cell_lower(int j) const;  // 1-based; may be -inf
    double cell_upper(int j) const;  // 1-based; may be +inf
};

/// Builds the m-cell equal-mass partition. Rejects m < 2 and m so large that
/// the cell mass under-resolves the quadrature tolerance (the error message
/// carries the largest admissible m).
QuantilePartition build_partition(const BaseMeasure& measure, int m);

/// 1-based index of the cell containing x; throws std::domain_error when x
/// lies outside the closure of I.
int locate_cell(const QuantilePartition& partition, double x);

}  // namespace lecam
