#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lecam {

/// Tolerances for the adaptive integrator. `abs_tol` is an absolute target
/// for the whole requested range; subdivision stops once the local error
/// estimate fits the proportional share of the budget. `max_leaves` bounds
/// the total number of panels so divergent integrands fail fast instead of
/// exhausting memory once the per-panel budget drops below roundoff.
struct QuadratureConfig {
    double abs_tol = 1e-10;
    int max_depth = 42;
    std::size_t max_leaves = 20000;
};

/// Raised when the error budget cannot be met; carries the best estimate so
/// callers can report how far the integrator got.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double value, double achieved_tol)
        : std::runtime_error(what), value_(value), achieved_(achieved_tol) {}
    double value() const { return value_; }
    double achieved_tolerance() const { return achieved_; }

private:
    double value_;
    double achieved_;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// One converged leaf of the adaptive subdivision, used to cache cumulative
/// integrals for fast partial re-evaluation.
struct QuadratureLeaf {
    double lo = 0.0;
    double hi = 0.0;
    double value = 0.0;
    double error = 0.0;
};

using ScalarFn = std::function<double(double)>;

/// Single 7-15 Gauss-Kronrod panel on [a, b]; no subdivision.
QuadratureResult gk15(const ScalarFn& f, double a, double b);

/// Adaptive bisection driven by the Kronrod error estimate. Throws
/// QuadratureError if the budget is not met at max_depth.
QuadratureResult integrate_adaptive(const ScalarFn& f, double a, double b,
                                    const QuadratureConfig& cfg = {});

/// Same as integrate_adaptive but returns the converged leaves in ascending
/// order; sum of leaf values equals the integral.
std::vector<QuadratureLeaf> integrate_leaves(const ScalarFn& f, double a, double b,
                                             const QuadratureConfig& cfg = {});

/// Integrates across `points` (ascending), restarting at every point so that
/// kinks or breakpoints never straddle a panel.
QuadratureResult integrate_with_splits(const ScalarFn& f, const std::vector<double>& points,
                                       const QuadratureConfig& cfg = {});

}  // namespace lecam
