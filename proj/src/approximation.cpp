#include "lecam/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lecam {

double PiecewiseLinearDensity::operator()(double x) const {
    if (std::isnan(x) || !interval.contains(x)) return 0.0;
    if (x <= knots.front()) return values.front();
    if (x >= knots.back()) return values.back();
    const auto it = std::upper_bound(knots.begin(), knots.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - knots.begin());
    const double t = (x - knots[i - 1]) / (knots[i] - knots[i - 1]);
    return values[i - 1] + t * (values[i] - values[i - 1]);
}

HatBasis::HatBasis(QuantilePartition partition) : part_(std::move(partition)) {
    peak_ = 1.0 / part_.cell_mass;
    const int m = part_.m;
    const auto& xs = part_.barycenters;
    const double lo = part_.measure.interval().lower;
    const double hi = part_.measure.interval().upper;
    elems_.resize(static_cast<std::size_t>(m));
    for (int j = 1; j <= m; ++j) {
        auto& el = elems_[static_cast<std::size_t>(j) - 1];
        if (j == 1)
            el.edges = {lo, xs[0], xs[1]};
        else if (j == m)
            el.edges = {xs[static_cast<std::size_t>(m) - 2],
                        xs[static_cast<std::size_t>(m) - 1], hi};
        else
            el.edges = {xs[static_cast<std::size_t>(j) - 2], xs[static_cast<std::size_t>(j) - 1],
                        xs[static_cast<std::size_t>(j)]};
        el.cum.assign(el.edges.size(), 0.0);
        for (std::size_t k = 1; k < el.edges.size(); ++k) {
            const double piece = part_.measure.integrate(
                [this, j](double x) { return value(j, x); }, el.edges[k - 1], el.edges[k]);
            el.cum[k] = el.cum[k - 1] + piece;
        }
    }
}

double HatBasis::support_lower(int j) const {
    if (j < 1 || j > part_.m) throw std::out_of_range("hat basis: element index");
    return elems_[static_cast<std::size_t>(j) - 1].edges.front();
}

double HatBasis::support_upper(int j) const {
    if (j < 1 || j > part_.m) throw std::out_of_range("hat basis: element index");
    return elems_[static_cast<std::size_t>(j) - 1].edges.back();
}

double HatBasis::value(int j, double x) const {
    if (j < 1 || j > part_.m) throw std::out_of_range("hat basis: element index");
    if (std::isnan(x) || !part_.measure.interval().contains(x)) return 0.0;
    const int m = part_.m;
    const auto& xs = part_.barycenters;
    const double xj = xs[static_cast<std::size_t>(j) - 1];
    if (x <= xj) {
        if (j == 1) return peak_;  // flat from the lower endpoint
        const double xl = xs[static_cast<std::size_t>(j) - 2];
        if (x <= xl) return 0.0;
        return peak_ * (x - xl) / (xj - xl);
    }
    if (j == m) return peak_;  // flat to the upper endpoint
    const double xr = xs[static_cast<std::size_t>(j)];
    if (x >= xr) return 0.0;
    return peak_ * (xr - x) / (xr - xj);
}

double HatBasis::cumulative(int j, double t) const {
    if (j < 1 || j > part_.m) throw std::out_of_range("hat basis: element index");
    const auto& el = elems_[static_cast<std::size_t>(j) - 1];
    if (std::isnan(t)) throw std::domain_error("hat basis cumulative: NaN argument");
    if (t <= el.edges.front()) return 0.0;
    if (t >= el.edges.back()) return el.cum.back();
    std::size_t k = 1;
    while (k + 1 < el.edges.size() && t > el.edges[k]) ++k;
    return el.cum[k - 1] +
           part_.measure.integrate([this, j](double x) { return value(j, x); }, el.edges[k - 1],
                                   t);
}

double HatBasis::normalization(int j) const {
    if (j < 1 || j > part_.m) throw std::out_of_range("hat basis: element index");
    return elems_[static_cast<std::size_t>(j) - 1].cum.back();
}

double HatBasis::max_normalization_defect() const {
    double d = 0.0;
    for (int j = 1; j <= part_.m; ++j) d = std::max(d, std::abs(normalization(j) - 1.0));
    return d;
}

double HatBasis::expand(const std::vector<double>& coeffs, double x) const {
    if (static_cast<int>(coeffs.size()) != part_.m)
        throw std::invalid_argument("hat expand: coefficient count must equal m");
    if (std::isnan(x) || !part_.measure.interval().contains(x)) return 0.0;
    // at most two elements are active at any x
    const auto& xs = part_.barycenters;
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const int hi = static_cast<int>(it - xs.begin()) + 1;  // first element with barycenter > x
    double out = 0.0;
    for (int j = std::max(1, hi - 1); j <= std::min(part_.m, hi); ++j)
        out += coeffs[static_cast<std::size_t>(j) - 1] * value(j, x);
    return out;
}

HatBasis build_hat_basis(QuantilePartition partition) { return HatBasis(std::move(partition)); }

std::vector<double> cell_masses(const ScalarFn& f, const QuantilePartition& partition) {
    std::vector<double> out(static_cast<std::size_t>(partition.m));
    for (int j = 1; j <= partition.m; ++j)
        out[static_cast<std::size_t>(j) - 1] =
            partition.measure.integrate(f, partition.cell_lower(j), partition.cell_upper(j));
    return out;
}

PiecewiseLinearDensity hat_density(const std::vector<double>& masses,
                                   const QuantilePartition& partition) {
    if (static_cast<int>(masses.size()) != partition.m)
        throw std::invalid_argument("hat_density: need one mass per cell");
    PiecewiseLinearDensity d;
    d.interval = partition.measure.interval();
    d.knots = partition.barycenters;
    d.values.resize(masses.size());
    for (std::size_t j = 0; j < masses.size(); ++j) {
        if (!(masses[j] >= 0.0) || !std::isfinite(masses[j]))
            throw std::invalid_argument("hat_density: masses must be finite and nonnegative");
        d.values[j] = masses[j] / partition.cell_mass;
    }
    return d;
}

namespace {

std::vector<double> interior_splits(const QuantilePartition& p) {
    std::vector<double> splits = p.barycenters;
    splits.insert(splits.end(), p.breakpoints.begin(), p.breakpoints.end());
    std::sort(splits.begin(), splits.end());
    splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
    return splits;
}

}  // namespace

ApproxErrors error_functionals(const ScalarFn& f, const QuantilePartition& partition) {
    ApproxErrors e;
    auto sqrt_f = [&f](double x) { return std::sqrt(std::max(0.0, f(x))); };
    e.masses_f = cell_masses(f, partition);
    e.root_masses = cell_masses(sqrt_f, partition);
    e.f_hat = hat_density(e.masses_f, partition);
    e.sqrt_f_hat = hat_density(e.root_masses, partition);

    const auto splits = interior_splits(partition);
    const auto& nu0 = partition.measure;
    const double H2 = nu0.integrate_split(
        [&](double x) {
            const double d = sqrt_f(x) - std::sqrt(std::max(0.0, e.f_hat(x)));
            return d * d;
        },
        splits);
    const double A2 = nu0.integrate_split(
        [&](double x) {
            const double d = e.sqrt_f_hat(x) - sqrt_f(x);
            return d * d;
        },
        splits);
    double B2 = 0.0;
    const double root_mu = std::sqrt(partition.cell_mass);
    for (std::size_t j = 0; j < e.masses_f.size(); ++j) {
        const double d = e.root_masses[j] / root_mu - std::sqrt(std::max(0.0, e.masses_f[j]));
        B2 += d * d;
    }
    e.H = std::sqrt(std::max(0.0, H2));
    e.A = std::sqrt(std::max(0.0, A2));
    e.B = std::sqrt(B2);
    return e;
}

double l2_distance_sq(const ScalarFn& f, const PiecewiseLinearDensity& approx,
                      const BaseMeasure& measure) {
    return measure.integrate_split(
        [&](double x) {
            const double d = f(x) - approx(x);
            return d * d;
        },
        approx.knots);
}

double lemma_l2_bound(double gamma, double K, double M, const QuantilePartition& partition) {
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("lemma_l2_bound: gamma must lie in (0, 1]");
    if (!(K >= 0.0) || !(M >= 0.0))
        throw std::invalid_argument("lemma_l2_bound: constants must be nonnegative");
    if (!partition.measure.interval().finite())
        throw std::invalid_argument("lemma_l2_bound: requires a bounded interval");
    const double mu = partition.cell_mass;
    const double l = partition.finite_mesh;
    const double inner = 3.0 * K * std::pow(l, 1.0 + gamma) + M * l;
    return 2.0 * mu * inner * inner + 18.0 * K * K * std::pow(l, 2.0 + 2.0 * gamma);
}

}  // namespace lecam
