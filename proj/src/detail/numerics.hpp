#pragma once

// Small numeric kernels shared by the solvers. Header-only and internal;
// nothing here is part of the public API.

#include <algorithm>
#include <cmath>
#include <functional>

#include "stakepool/errors.hpp"

namespace stakepool::detail {

// Root of a (weakly) decreasing g on [lo, hi] with g(lo) >= 0 >= g(hi).
// Stops when |g(mid)| < value_tol or the bracket collapses; hard cap of
// 200 halvings keeps worst-case cost bounded.
inline double bisect_decreasing(const std::function<double(double)>& g,
                                double lo, double hi, double value_tol) {
    double glo = g(lo);
    double ghi = g(hi);
    if (glo < 0.0 && glo > -value_tol) return lo;
    if (ghi > 0.0 && ghi < value_tol) return hi;
    if (glo < 0.0 || ghi > 0.0)
        throw NumericError("bisection bracket does not straddle a root");
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (std::abs(gm) < value_tol) return mid;
        if (gm > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15 * std::max(1.0, std::abs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

// Golden-section maximizer of a unimodal f on [a, b].
inline double golden_max(const std::function<double(double)>& f, double a,
                         double b, double tol = 1e-9) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

inline double simpson_rule(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double m, double b, double fa,
                                   double fm, double fb, double whole,
                                   double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson_rule(fa, flm, fm, m - a);
    const double right = simpson_rule(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    // Depth has to run deep: integrable endpoint singularities (power-law
    // densities with alpha < 1) only resolve after many halvings.
    if (depth > 160 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, lm, m, fa, flm, fm, left, tol / 2.0,
                                depth + 1) +
           adaptive_simpson_rec(f, m, rm, b, fm, frm, fb, right, tol / 2.0,
                                depth + 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double tol = 1e-9) {
    if (b <= a) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = simpson_rule(fa, fm, fb, b - a);
    return adaptive_simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, 0);
}

} // namespace stakepool::detail
