#include "lecam/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lecam {
namespace {

// 15-point Kronrod abscissae on [0, 1] side (symmetric) with the embedded
// 7-point Gauss rule on the odd indices. Standard QUADPACK constants.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

}  // namespace

QuadratureResult gk15(const ScalarFn& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fv[15];
    const double fc = f(center);
    fv[7] = fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        fv[i] = f(center - dx);
        fv[14 - i] = f(center + dx);
    }

    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    double resabs = std::abs(resk);
    for (int i = 0; i < 7; ++i) {
        const double sum = fv[i] + fv[14 - i];
        resk += kWgk[i] * sum;
        resabs += kWgk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
        if (i % 2 == 1) resg += kWg[i / 2] * sum;
    }

    const double mean = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (int i = 0; i < 7; ++i)
        resasc += kWgk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));

    QuadratureResult out;
    out.value = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / eps50)
        err = std::max(eps50 * resabs, err);
    out.error_estimate = err;
    return out;
}

namespace {

struct Segment {
    double lo, hi, tol;
    int depth;
};

void adapt(const ScalarFn& f, double a, double b, const QuadratureConfig& cfg,
           std::vector<QuadratureLeaf>& leaves, double& err_total, bool& budget_met) {
    std::vector<Segment> stack;
    stack.push_back({a, b, cfg.abs_tol, 0});
    while (!stack.empty()) {
        const Segment seg = stack.back();
        stack.pop_back();
        const QuadratureResult r = gk15(f, seg.lo, seg.hi);
        const double mid = 0.5 * (seg.lo + seg.hi);
        const bool room = leaves.size() + stack.size() < cfg.max_leaves;
        const bool splittable =
            room && seg.depth < cfg.max_depth && mid > seg.lo && mid < seg.hi;
        if (r.error_estimate <= seg.tol || !splittable) {
            if (r.error_estimate > seg.tol) budget_met = false;
            leaves.push_back({seg.lo, seg.hi, r.value, r.error_estimate});
            err_total += r.error_estimate;
        } else {
            stack.push_back({mid, seg.hi, 0.5 * seg.tol, seg.depth + 1});
            stack.push_back({seg.lo, mid, 0.5 * seg.tol, seg.depth + 1});
        }
    }
}

}  // namespace

std::vector<QuadratureLeaf> integrate_leaves(const ScalarFn& f, double a, double b,
                                             const QuadratureConfig& cfg) {
    if (!(a <= b)) throw std::invalid_argument("integrate: requires a <= b");
    std::vector<QuadratureLeaf> leaves;
    if (a == b) return leaves;
    double err_total = 0.0;
    bool budget_met = true;
    adapt(f, a, b, cfg, leaves, err_total, budget_met);
    std::sort(leaves.begin(), leaves.end(),
              [](const QuadratureLeaf& x, const QuadratureLeaf& y) { return x.lo < y.lo; });
    if (!budget_met && err_total > cfg.abs_tol) {
        double value = 0.0;
        for (const auto& l : leaves) value += l.value;
        throw QuadratureError("quadrature did not converge to requested tolerance", value,
                              err_total);
    }
    return leaves;
}

QuadratureResult integrate_adaptive(const ScalarFn& f, double a, double b,
                                    const QuadratureConfig& cfg) {
    QuadratureResult out;
    for (const auto& leaf : integrate_leaves(f, a, b, cfg)) {
        out.value += leaf.value;
        out.error_estimate += leaf.error;
    }
    return out;
}

QuadratureResult integrate_with_splits(const ScalarFn& f, const std::vector<double>& points,
                                       const QuadratureConfig& cfg) {
    if (points.size() < 2) throw std::invalid_argument("integrate: needs at least two points");
    QuadratureResult out;
    QuadratureConfig local = cfg;
    local.abs_tol = cfg.abs_tol / static_cast<double>(points.size() - 1);
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i] <= points[i + 1]))
            throw std::invalid_argument("integrate: split points must be ascending");
        const QuadratureResult r = integrate_adaptive(f, points[i], points[i + 1], local);
        out.value += r.value;
        out.error_estimate += r.error_estimate;
    }
    return out;
}

}  // namespace lecam
