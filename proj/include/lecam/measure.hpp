#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lecam/quadrature.hpp"

namespace lecam {

/// Interval I = (a, b) with possibly infinite endpoints. The open/closed
/// flags are recorded for reporting; every integral here ignores endpoint
/// membership because the base measures carry no atoms.
struct IntervalSpec {
    double lower = 0.0;
    double upper = 1.0;
    bool lower_closed = true;
    bool upper_closed = true;

    bool finite() const;
    bool contains(double x) const;  // membership in the closure
    double width() const;           // +inf when unbounded
};

/// Holder smoothness data for a density: |f'(x) - f'(y)| <= K |x - y|^gamma.
struct HolderSpec {
    double gamma = 1.0;  // in (0, 1]
    double K = 1.0;
};

/// Density f with respect to a base measure, together with the class
/// constants kappa <= f <= M used by the bounds and by rejection sampling.
struct DensityParameter {
    std::function<double(double)> f;
    double kappa = 0.0;
    double M = 1.0;
    std::optional<HolderSpec> holder;
    std::string label;
};

/// Base measure nu0(dx) = g(x) dx on an interval. Construction precomputes a
/// CDF cache (adaptive quadrature leaves plus a 1024-entry quantile table),
/// after which cdf/quantile/integrate queries are cheap and deterministic.
/// Copies share the immutable cache.
class BaseMeasure {
public:
    static BaseMeasure uniform(double a, double b);
    /// g(x) = x^(a-1) on [0, L]; total mass L^a / a.
    static BaseMeasure power_law(double a, double L);
    /// g(x) = exp(-lambda x) on [0, inf); total mass 1 / lambda.
    static BaseMeasure exponential(double lambda);
    /// Piecewise-linear g through (xs, gs) on [xs.front(), xs.back()].
    static BaseMeasure tabulated(std::vector<double> xs, std::vector<double> gs);
    /// General density; `tail_scale` sets the unit of the substitution
    /// x = c + scale * u / (1 - u) used on infinite tails.
    static BaseMeasure from_density(IntervalSpec interval, std::function<double(double)> g,
                                    std::string family_name = "custom", double tail_scale = 1.0,
                                    QuadratureConfig quad = {});

    const IntervalSpec& interval() const { return interval_; }
    const std::string& family_name() const { return family_; }
    const QuadratureConfig& quad_config() const { return quad_; }
    double g(double x) const { return g_(x); }
    double total_mass() const;

    /// nu0(I intersect (-inf, t]).
    double cdf(double t) const;
    /// Point t with cdf(t) = p * total_mass, p in [0, 1]; p of 0 or 1 returns
    /// the (possibly infinite) endpoint. Bisection refined to 1e-12 interval
    /// width, scaled by magnitude on unbounded tails.
    double quantile(double p) const;
    /// Same root-solve against an absolute mass target c in [0, total_mass].
    double quantile_of_mass(double c) const;

    /// Integral of h against nu0 over [lo, hi] intersect I. The integrand is
    /// assumed smooth on the range; split at kinks via the overload below.
    double integrate(const ScalarFn& h, double lo, double hi) const;
    double integrate(const ScalarFn& h) const;
    /// Splits at interior points (clamped to I) before integrating.
    double integrate_split(const ScalarFn& h, const std::vector<double>& interior_splits) const;
    /// Plain Lebesgue integral of h over [lo, hi] intersect I (no g weight).
    double integrate_dx(const ScalarFn& h, double lo, double hi) const;

    struct Cache;

private:
    BaseMeasure() = default;

    IntervalSpec interval_;
    std::function<double(double)> g_;
    std::string family_;
    QuadratureConfig quad_;
    std::shared_ptr<const Cache> cache_;
};

/// Diagnostics from the documented heuristic grid check of the class
/// constraints kappa <= f <= M, integral one, and the Holder condition.
struct ClassReport {
    double min_f = 0.0;
    double max_f = 0.0;
    double integral_defect = 0.0;       // |int f dnu0 - 1|
    double holder_quotient = 0.0;       // max sampled |f'(x)-f'(y)| / |x-y|^gamma
    bool within_bounds = false;         // kappa <= min_f and max_f <= M
    bool holder_ok = true;              // quotient <= K (when Holder data present)
};

ClassReport check_class_membership(const DensityParameter& f, const BaseMeasure& measure,
                                   std::size_t grid_points = 2001);

/// Draws from the probability law f dnu0 / (int f dnu0) by rejection:
/// proposals from nu0 / nu0(I) via inverse CDF, acceptance f(x) / M. Expected
/// acceptance is at least 1 / (M nu0(I)) when f integrates to one. One
/// derived RNG stream per draw index keeps output schedule-independent.
std::vector<double> sample_from_density(const BaseMeasure& measure, const DensityParameter& f,
                                        std::size_t count, std::uint64_t seed);

}  // namespace lecam
