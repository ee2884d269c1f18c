#ifndef AMBISTOP_SPECFUN_HPP
#define AMBISTOP_SPECFUN_HPP

#include <cmath>
#include <string>

#include "ambistop/core.hpp"
#include "ambistop/numerics.hpp"

namespace ambistop::specfun {

struct SpecFunConfig {
    double series_tol = 1e-14;
    int max_terms = 500;
    int quad_points = 200;
};

namespace detail {

inline bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::floor(x);
}

// log|Gamma(x)| and sign, defined for non-pole x.
inline double lgamma_signed(double x, int& sign) {
    if (x > 0) {
        sign = 1;
        return std::lgamma(x);
    }
    // reflection: Gamma(x)Gamma(1-x) = pi / sin(pi x)
    double s = std::sin(M_PI * x);
    sign = s < 0 ? -1 : 1;
    return std::log(M_PI / std::abs(s)) - std::lgamma(1.0 - x);
}

// Gamma(p)/Gamma(q) with signs, via lgamma.
inline double gamma_ratio(double p, double q) {
    int sp, sq;
    double lp = lgamma_signed(p, sp);
    double lq = lgamma_signed(q, sq);
    return sp * sq * std::exp(lp - lq);
}

// Direct Taylor series for M(a, b, z).
inline double kummer_series(double a, double b, double z, const SpecFunConfig& cfg) {
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < cfg.max_terms; ++n) {
        term *= (a + n) * z / ((b + n) * (n + 1.0));
        sum += term;
        if (std::abs(term) < cfg.series_tol * std::abs(sum)) return sum;
    }
    throw NoConvergence("kummer_m: series did not converge");
}

// Exponentially dominant large-z expansion,
//   M(a,b,z) ~ Gamma(b)/Gamma(a) e^z z^{a-b} sum_n (b-a)_n (1-a)_n / (n! z^n).
inline double kummer_asymptotic(double a, double b, double z, const SpecFunConfig& cfg) {
    double term = 1.0, sum = 1.0, prev = std::abs(term);
    for (int n = 0; n < cfg.max_terms; ++n) {
        term *= (b - a + n) * (1.0 - a + n) / ((n + 1.0) * z);
        if (std::abs(term) > prev) break;  // divergent tail of the asymptotic series
        sum += term;
        prev = std::abs(term);
        if (std::abs(term) < cfg.series_tol * std::abs(sum)) break;
    }
    return gamma_ratio(b, a) * std::exp(z + (a - b) * std::log(z)) * sum;
}

}  // namespace detail

/// Confluent hypergeometric function of the first kind M(a, b, z), z >= 0.
inline double kummer_m(double a, double b, double z,
                       const SpecFunConfig& cfg = {}) {
    if (detail::is_nonpositive_integer(b))
        throw ParameterError("kummer_m: b must not be a nonpositive integer");
    if (z < 0) throw ParameterError("kummer_m: z must be >= 0");
    if (z == 0.0) return 1.0;
    if (z <= 50.0) return detail::kummer_series(a, b, z, cfg);
    return detail::kummer_asymptotic(a, b, z, cfg);
}

/// Confluent hypergeometric function of the second kind U(a, b, z) for a > 0,
/// z > 0, via the Laplace integral
///   U(a,b,z) = (1/Gamma(a)) \int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt.
/// The substitution w = z t maps this onto a gamma-type weight that is split
/// at w = 1 (with w = u^{1/a} below to remove the endpoint singularity) and
/// truncated where e^{-w} underflows.
inline double tricomi_u(double a, double b, double z,
                        const SpecFunConfig& cfg = {}) {
    (void)cfg;
    if (!(a > 0)) throw ParameterError("tricomi_u: a must be > 0");
    if (!(z > 0)) throw ParameterError("tricomi_u: z must be > 0");
    const double p = b - a - 1.0;
    auto weight = [&](double w) { return std::pow(1.0 + w / z, p); };

    // The quadrature tolerance must track the integrand's magnitude: for
    // small z the weight factor can reach ~1/z^|p|, and a fixed absolute
    // tolerance would demand impossible relative accuracy.
    auto scaled_quad = [&](auto&& fn, double lo, double hi) {
        double peak = 0.0;
        for (int i = 0; i <= 32; ++i) {
            double x = lo + (hi - lo) * i / 32.0;
            peak = std::max(peak, std::abs(fn(x)));
        }
        double tol = 1e-12 * std::max(1.0, peak * (hi - lo));
        return num::integrate(fn, lo, hi, tol);
    };

    // piece 1: w in (0, 1], w = u^{1/a}
    double i1 = scaled_quad(
        [&](double u) {
            if (u <= 0.0) return 0.0;
            double w = std::pow(u, 1.0 / a);
            return std::exp(-w) * weight(w);
        },
        0.0, 1.0) / a;

    // piece 2: w in [1, w_max], w = e^s
    const double w_max = 745.0;
    double i2 = scaled_quad(
        [&](double s) {
            double w = std::exp(s);
            return std::exp(-w + a * s) * weight(w);
        },
        0.0, std::log(w_max));

    return (i1 + i2) * std::exp(-a * std::log(z) - std::lgamma(a));
}

/// Upper incomplete gamma function Gamma(s, x), s > 0, x >= 0.
inline double gamma_upper(double s, double x, const SpecFunConfig& cfg = {}) {
    if (!(s > 0)) throw ParameterError("gamma_upper: s must be > 0");
    if (x < 0) throw ParameterError("gamma_upper: x must be >= 0");
    if (x == 0.0) return std::tgamma(s);
    const double tol = 1e-15;
    const int max_iter = std::max(cfg.max_terms, 500);
    if (x < s + 1.0) {
        // series for the lower function, then complement
        double term = 1.0 / s, sum = term;
        for (int n = 1; n < max_iter; ++n) {
            term *= x / (s + n);
            sum += term;
            if (std::abs(term) < tol * std::abs(sum)) break;
        }
        double lower = sum * std::exp(-x + s * std::log(x));
        return std::tgamma(s) - lower;
    }
    // continued fraction (modified Lentz)
    const double tiny = 1e-300;
    double b0 = x + 1.0 - s;
    double c = 1.0 / tiny, d = 1.0 / b0, h = d;
    for (int i = 1; i < max_iter; ++i) {
        double an = -i * (i - s);
        b0 += 2.0;
        d = an * d + b0;
        if (std::abs(d) < tiny) d = tiny;
        c = b0 + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < tol) break;
    }
    return std::exp(-x + s * std::log(x)) * h;
}

/// Whittaker function of the first kind M_{a,b}(z).
inline double whittaker_m(double a, double b, double z,
                          const SpecFunConfig& cfg = {}) {
    if (detail::is_nonpositive_integer(1.0 + 2.0 * b))
        throw ParameterError("whittaker_m: 1+2b must not be a nonpositive integer");
    if (!(z > 0)) throw ParameterError("whittaker_m: z must be > 0");
    return std::exp(-0.5 * z) * std::pow(z, b + 0.5) *
           kummer_m(b - a + 0.5, 1.0 + 2.0 * b, z, cfg);
}

/// Whittaker function of the second kind W_{a,b}(z).
inline double whittaker_w(double a, double b, double z,
                          const SpecFunConfig& cfg = {}) {
    if (!(z > 0)) throw ParameterError("whittaker_w: z must be > 0");
    return std::exp(-0.5 * z) * std::pow(z, b + 0.5) *
           tricomi_u(b - a + 0.5, 1.0 + 2.0 * b, z, cfg);
}

}  // namespace ambistop::specfun

#endif  // AMBISTOP_SPECFUN_HPP
