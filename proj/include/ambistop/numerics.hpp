#ifndef AMBISTOP_NUMERICS_HPP
#define AMBISTOP_NUMERICS_HPP

#include <cmath>
#include <functional>
#include <utility>

#include "ambistop/core.hpp"

namespace ambistop::num {

/// Discrete sign with the tie broken as +1.
inline double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

/// Bracketed bisection to interval width `xtol`. Requires a sign change on
/// [lo, hi]; an endpoint that is exactly zero is returned as the root.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol = 1e-12) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw BracketFailure("bisect: no sign change on [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "]");
    while (hi - lo > xtol) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Bisection followed by a fixed number of Newton polish steps, clamped to
/// the original bracket.
template <class F, class DF>
double bisect_newton(F&& f, DF&& df, double lo, double hi, double xtol = 1e-12,
                     int polish = 3) {
    double x = bisect(f, lo, hi, xtol);
    for (int i = 0; i < polish; ++i) {
        double d = df(x);
        if (d == 0.0 || !std::isfinite(d)) break;
        double step = f(x) / d;
        double xn = x - step;
        if (xn < lo || xn > hi || !std::isfinite(xn)) break;
        x = xn;
    }
    return x;
}

/// Golden-section maximization on [lo, hi]; returns (argmax, max).
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi,
                                     double tol = 1e-10) {
    const double g = 0.6180339887498949;
    double a = lo, b = hi;
    double c1 = b - g * (b - a), c2 = a + g * (b - a);
    double f1 = f(c1), f2 = f(c2);
    while (b - a > tol * std::max(1.0, std::abs(b))) {
        if (f1 < f2) {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + g * (b - a);
            f2 = f(c2);
        } else {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - g * (b - a);
            f1 = f(c1);
        }
    }
    double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

namespace detail {
template <class F>
double simpson_rec(F&& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson quadrature with absolute tolerance.
template <class F>
double integrate(F&& f, double a, double b, double abstol = 1e-12,
                 int max_depth = 60) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, abstol, max_depth);
}

/// Expand [lo, hi] upward geometrically until f changes sign; throws
/// BracketFailure after `max_doublings`.
template <class F>
std::pair<double, double> expand_bracket_up(F&& f, double lo, double step,
                                            int max_doublings = 60) {
    double flo = f(lo);
    double hi = lo + step;
    for (int i = 0; i < max_doublings; ++i) {
        double fhi = f(hi);
        if ((flo > 0) != (fhi > 0) || fhi == 0.0) return {lo, hi};
        step *= 2.0;
        hi += step;
    }
    throw BracketFailure("expand_bracket_up: no sign change found");
}

}  // namespace ambistop::num

#endif  // AMBISTOP_NUMERICS_HPP
