#pragma once

#include <cmath>
#include <queue>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace brownscope::detail {

/// Gauss-Legendre nodes and weights mapped to [lo, hi].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n, double lo,
                                                                   double hi);

/// Globally adaptive Gauss-Kronrod (15 points per panel) on [a, b]: the
/// panel with the largest error estimate is bisected until the summed error
/// is below max(abs_tol, rel_tol * |I|) or the panel budget runs out. The
/// integrand is never evaluated at panel endpoints, so integrable endpoint
/// singularities are fine.
template <class F>
double adaptive(F&& f, double a, double b, double rel_tol = 1e-13, double abs_tol = 1e-300,
                std::size_t max_panels = 4000) {
    if (!(b > a)) return 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    auto panel = [&](double lo, double hi) {
        double err = 0.0;
        const double v = GK::integrate(f, lo, hi, 0, 0.0, &err);
        return Panel{lo, hi, v, err};
    };
    std::priority_queue<Panel> queue;
    queue.push(panel(a, b));
    double total = queue.top().value, error = queue.top().error;
    while (error > std::max(abs_tol, rel_tol * std::abs(total)) && queue.size() < max_panels) {
        const Panel worst = queue.top();
        const double mid = 0.5 * (worst.a + worst.b);
        // Panels this narrow would put Kronrod nodes on the endpoints.
        if (worst.b - worst.a < 1e-12 * std::max(1.0, std::abs(mid))) break;
        queue.pop();
        const Panel left = panel(worst.a, mid), right = panel(mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    // Re-sum to avoid drift from the running updates.
    double sum = 0.0;
    while (!queue.empty()) {
        sum += queue.top().value;
        queue.pop();
    }
    return sum;
}

/// Adaptive integration split at an interior breakpoint c (ignored if outside).
template <class F>
double adaptive_split(F&& f, double a, double b, double c, double tol = 1e-13) {
    if (c > a && c < b) return adaptive(f, a, c, tol) + adaptive(f, c, b, tol);
    return adaptive(f, a, b, tol);
}

}  // namespace brownscope::detail
