#pragma once

#include <cmath>
#include <functional>

// Small self-contained numeric helpers for cross-checking library results.
// Deliberately simpler than (and independent of) the library quadrature.
namespace testsupport {

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int points = 20001) {
    if (points < 3) points = 3;
    if (points % 2 == 0) ++points;
    const double h = (b - a) / static_cast<double>(points - 1);
    double acc = f(a) + f(b);
    for (int i = 1; i + 1 < points; ++i) {
        acc += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

inline double normal_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * 2.5066282746310005024);
}

}  // namespace testsupport
