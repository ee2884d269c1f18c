#ifndef AMBISTOP_LINEAR_HPP
#define AMBISTOP_LINEAR_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "ambistop/core.hpp"
#include "ambistop/numerics.hpp"

namespace ambistop::linear {

// ---------------------------------------------------------------------------
// Exponent constants of the reduced one-dimensional problem
// ---------------------------------------------------------------------------

/// Roots of (1/2)|a|^2 b^2 - kappa |a| b - r = 0 and their mirrored pair.
struct Exponents {
    double psi;       ///< positive root
    double phi;       ///< negative root
    double psi_hat;   ///< -phi
    double phi_hat;   ///< -psi
};

inline Exponents compute_exponents(const AmbiguityParams& p) {
    p.validate_linear();
    double s = std::sqrt(p.kappa * p.kappa + 2.0 * p.r) / p.a_norm;
    double m = p.kappa / p.a_norm;
    return {m + s, m - s, s - m, -m - s};
}

// ---------------------------------------------------------------------------
// The reference-point family U_c
// ---------------------------------------------------------------------------

/// Smooth strictly convex excessive function with U_c(c) = 1, U_c'(c) = 0.
/// U_c = max(h1, h2); h1 carries the branch used on [c, inf), h2 the branch
/// used on (-inf, c]. c = -inf gives e^{psi y}, c = +inf gives e^{phi_hat y}.
class UcLinear {
public:
    UcLinear(const Exponents& e, double c) : e_(e), c_(c) {}

    double c() const { return c_; }
    const Exponents& exponents() const { return e_; }

    double h1(double y) const {
        double psi = e_.psi, phi = e_.phi;
        return psi / (psi - phi) * std::exp(phi * (y - c_)) -
               phi / (psi - phi) * std::exp(psi * (y - c_));
    }
    double h1_prime(double y) const {
        double psi = e_.psi, phi = e_.phi;
        return psi * phi / (psi - phi) *
               (std::exp(phi * (y - c_)) - std::exp(psi * (y - c_)));
    }
    double h1_second(double y) const {
        double psi = e_.psi, phi = e_.phi;
        return psi * phi / (psi - phi) *
               (phi * std::exp(phi * (y - c_)) - psi * std::exp(psi * (y - c_)));
    }
    double h2(double y) const {
        double psi = e_.psi_hat, phi = e_.phi_hat;
        return psi / (psi - phi) * std::exp(phi * (y - c_)) -
               phi / (psi - phi) * std::exp(psi * (y - c_));
    }
    double h2_prime(double y) const {
        double psi = e_.psi_hat, phi = e_.phi_hat;
        return psi * phi / (psi - phi) *
               (std::exp(phi * (y - c_)) - std::exp(psi * (y - c_)));
    }
    double h2_second(double y) const {
        double psi = e_.psi_hat, phi = e_.phi_hat;
        return psi * phi / (psi - phi) *
               (phi * std::exp(phi * (y - c_)) - psi * std::exp(psi * (y - c_)));
    }

    double value(double y) const {
        if (c_ == -kInf) return std::exp(e_.psi * y);
        if (c_ == kInf) return std::exp(e_.phi_hat * y);
        return std::max(h1(y), h2(y));
    }
    double deriv(double y) const {
        if (c_ == -kInf) return e_.psi * std::exp(e_.psi * y);
        if (c_ == kInf) return e_.phi_hat * std::exp(e_.phi_hat * y);
        return y >= c_ ? h1_prime(y) : h2_prime(y);
    }
    double second(double y) const {
        if (c_ == -kInf) return e_.psi * e_.psi * std::exp(e_.psi * y);
        if (c_ == kInf) return e_.phi_hat * e_.phi_hat * std::exp(e_.phi_hat * y);
        return y >= c_ ? h1_second(y) : h2_second(y);
    }
    double operator()(double y) const { return value(y); }

private:
    Exponents e_;
    double c_;
};

// ---------------------------------------------------------------------------
// Generic representation solver
// ---------------------------------------------------------------------------

struct RepresentationResult {
    double value;
    double c_star;
    double lambda_star;
};

namespace detail {

// sup_w F(w) / U_c(w) over the payoff's relevant range, with golden-section
// refinement around the grid argmax. Returns {argmax, sup}.
inline std::pair<double, double> sup_ratio(const Payoff& payoff, const UcLinear& uc,
                                           double wlo, double whi, int n = 801) {
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) {
        double w = wlo + (whi - wlo) * i / (n - 1.0);
        vals[i] = payoff(w) / uc.value(w);
    }
    double h = (whi - wlo) / (n - 1.0);
    auto ratio = [&](double w) { return payoff(w) / uc.value(w); };
    // refine every local grid maximum: competing branches can be numerically
    // tied near the optimum, so polishing only the argmax is not enough
    double best = -kInf, wbest = wlo;
    for (int i = 0; i < n; ++i) {
        bool local = (i == 0 || vals[i] >= vals[i - 1]) &&
                     (i == n - 1 || vals[i] >= vals[i + 1]);
        if (!local) continue;
        double w = wlo + (whi - wlo) * i / (n - 1.0);
        double a = std::max(wlo, w - h), b = std::min(whi, w + h);
        auto [wm, vm] = num::golden_max(ratio, a, b, 1e-12);
        if (vm > best) {
            best = vm;
            wbest = wm;
        }
        if (vals[i] > best) {
            best = vals[i];
            wbest = w;
        }
    }
    return {wbest, best};
}

inline double payoff_scale_L(const Payoff& payoff) {
    if (payoff.kind() == PayoffKind::UserTable) {
        double m = std::max(std::abs(payoff.table().front().first),
                            std::abs(payoff.table().back().first));
        return std::max(10.0, 2.0 * m);
    }
    return 10.0;
}

}  // namespace detail

/// Value at a point via the excessive-majorant representation
///   V(y) = inf over c, lambda of lambda U_c(y) subject to lambda U_c >= F.
/// The c search uses a 201-point sinh-spaced grid over [-L, L] plus the two
/// infinite endpoints, then golden-section refinement of c.
inline RepresentationResult value_via_representation(const AmbiguityParams& p,
                                                     const Payoff& payoff,
                                                     double y) {
    Exponents e = compute_exponents(p);
    const double L = detail::payoff_scale_L(payoff);
    const double wlo = -L, whi = L;

    auto objective = [&](double c) -> double {
        UcLinear uc(e, c);
        auto [wm, lam] = detail::sup_ratio(payoff, uc, wlo, whi);
        (void)wm;
        if (!std::isfinite(lam)) return kInf;
        return lam * uc.value(y);
    };

    double best_obj = kInf, best_c = 0.0;
    const int nc = 201;
    const double sh = std::sinh(3.0);
    for (int i = 0; i < nc; ++i) {
        double u = -1.0 + 2.0 * i / (nc - 1.0);
        double c = L * std::sinh(3.0 * u) / sh;
        double obj = objective(c);
        if (obj < best_obj) {
            best_obj = obj;
            best_c = c;
        }
    }
    for (double c : {-kInf, kInf}) {
        UcLinear uc(e, c);
        auto [wm, lam] = detail::sup_ratio(payoff, uc, wlo, whi);
        (void)wm;
        double obj = lam * uc.value(y);
        if (std::isfinite(obj) && obj < best_obj) {
            best_obj = obj;
            best_c = c;
        }
    }
    if (!std::isfinite(best_obj))
        throw UnboundedRatio("value_via_representation: F/U_c unbounded for every c");

    if (std::isfinite(best_c)) {
        double step = 2.0 * L / (nc - 1.0) * 4.0;
        double a = best_c - step, b = best_c + step;
        auto [cm, negobj] = num::golden_max(
            [&](double c) { return -objective(c); }, a, b, 1e-8);
        if (-negobj < best_obj) {
            best_obj = -negobj;
            best_c = cm;
        }
    }
    UcLinear uc(e, best_c);
    auto [wm, lam] = detail::sup_ratio(payoff, uc, wlo, whi);
    (void)wm;
    return {best_obj, best_c, lam};
}

// ---------------------------------------------------------------------------
// Even payoffs (two-sided symmetric threshold rule)
// ---------------------------------------------------------------------------

inline Solution solve_even(const AmbiguityParams& p, const Payoff& payoff) {
    Exponents e = compute_exponents(p);
    for (double y : {0.3, 0.7, 1.3, 2.9, 5.1}) {
        if (std::abs(payoff(y) - payoff(-y)) >
            1e-12 * std::max(1.0, std::abs(payoff(y))))
            throw NotEven("solve_even: payoff is not even");
    }
    UcLinear uc(e, 0.0);
    auto ratio = [&](double x) { return payoff(x) / uc.value(x); };

    // unimodality check on a log grid over (0, inf)
    int flips = 0;
    double prev_slope = 0.0;
    double prev_x = 1e-4, prev_v = ratio(prev_x);
    for (int i = 1; i <= 120; ++i) {
        double x = 1e-4 * std::pow(10.0 / 1e-4, i / 120.0);
        double v = ratio(x);
        double slope = v - prev_v;
        if (i > 1 && slope * prev_slope < 0) ++flips;
        if (slope != 0.0) prev_slope = slope;
        prev_x = x;
        prev_v = v;
    }
    (void)prev_x;
    if (flips > 1) throw NotUnimodal("solve_even: F/U_0 has multiple local maxima");

    auto [xstar, lam] = num::golden_max(ratio, 1e-8, 10.0, 1e-12);
    Solution sol;
    sol.regime = Regime::SymmetricTwoSided;
    sol.c_star = 0.0;
    sol.thresholds = {-xstar, xstar};
    sol.lambda_star = lam;
    sol.generator = {GeneratorDescriptor::Kind::SignSwitchLinear, p.kappa, 0.0, 0.0, {}};
    double xs = xstar;
    sol.value = [e, lam, xs, payoff](double y) {
        if (std::abs(y) >= xs) return payoff(y);
        return lam * UcLinear(e, 0.0).value(y);
    };
    return sol;
}

// ---------------------------------------------------------------------------
// Digital payoff (k2 y + k3 on y >= 0, -k1 y below)
// ---------------------------------------------------------------------------

namespace detail {

struct DigitalWork {
    Exponents e;
    double k1, k2, k3;

    double x1star(double c) const {
        UcLinear uc(e, c);
        auto f1 = [&](double x) {
            return k2 * uc.h1(x) - uc.h1_prime(x) * (k2 * x + k3);
        };
        double lo = std::max(c, -k3 / k2) + 1e-13;
        auto [blo, bhi] = num::expand_bracket_up(f1, lo, 0.25);
        return num::bisect(f1, blo, bhi, 1e-14);
    }
    double x2star(double c) const {
        UcLinear uc(e, c);
        auto f2 = [&](double x) { return uc.h2_prime(x) * x - uc.h2(x); };
        double hi = std::min(c, 0.0) - 1e-13;
        auto g = [&](double t) { return f2(hi - t); };  // t >= 0 moves left
        auto [blo, bhi] = num::expand_bracket_up(g, 0.0, 0.25);
        double t = num::bisect(g, blo, bhi, 1e-14);
        return hi - t;
    }
    double pi1(double x, double c) const {
        return (k2 * x + k3) / UcLinear(e, c).h1(x);
    }
    double pi2(double x, double c) const {
        return -k1 * x / UcLinear(e, c).h2(x);
    }
};

}  // namespace detail

inline Solution solve_digital(const AmbiguityParams& p, const Payoff& payoff) {
    if (payoff.kind() != PayoffKind::DigitalAsymmetric)
        throw ParameterError("solve_digital: payoff must be DigitalAsymmetric");
    double k1 = payoff.k1(), k2 = payoff.k2(), k3 = payoff.k3();
    if (!(k1 > 0 && k2 > 0 && k3 > 0))
        throw ParameterError("solve_digital: k1, k2, k3 must be > 0");
    Exponents e = compute_exponents(p);
    detail::DigitalWork w{e, k1, k2, k3};

    auto D = [&](double c) {
        return w.pi1(w.x1star(c), c) - w.pi2(w.x2star(c), c);
    };
    double chat = num::bisect(D, -10.0, 10.0, 1e-13);
    double x1 = w.x1star(chat), x2 = w.x2star(chat);

    Solution sol;
    sol.generator = {GeneratorDescriptor::Kind::SignSwitchLinear, p.kappa, chat, 0.0, {}};
    if (x1 >= 0.0) {
        double lam = w.pi1(x1, chat);
        sol.regime = Regime::DigitalSmoothFit;
        sol.c_star = chat;
        sol.thresholds = {x2, x1};
        sol.lambda_star = lam;
        sol.value = [e, lam, chat, x1, x2, payoff](double y) {
            if (y >= x1 || y <= x2) return payoff(y);
            return lam * UcLinear(e, chat).value(y);
        };
        return sol;
    }

    // kink regime: exercise boundary pinned at the payoff discontinuity
    auto G = [&](double c) {
        double x2c = w.x2star(c);
        UcLinear uc(e, c);
        return -k1 * x2c / uc.h2(x2c) - k3 / uc.h1(0.0);
    };
    double cstar = num::bisect(G, -5.0, -1e-9, 1e-14);
    double x2k = w.x2star(cstar);
    UcLinear uc(e, cstar);
    double lam = k3 / uc.h1(0.0);
    sol.regime = Regime::DigitalKinkAtZero;
    sol.c_star = cstar;
    sol.thresholds = {x2k, 0.0};
    sol.lambda_star = lam;
    sol.generator.c = cstar;
    sol.value = [e, lam, cstar, x2k, payoff](double y) {
        if (y >= 0.0 || y <= x2k) return payoff(y);
        return lam * UcLinear(e, cstar).value(y);
    };
    return sol;
}

// ---------------------------------------------------------------------------
// Periodic payoffs
// ---------------------------------------------------------------------------

inline Solution solve_periodic_cosine(const AmbiguityParams& p) {
    Exponents ex = compute_exponents(p);
    const double psi = ex.psi, phi = ex.phi;
    const double x0 = M_PI;
    auto u0 = [&](double y) {
        return phi / (psi - phi) * std::exp(psi * (y - x0)) *
                   (std::sin(y) + psi * std::cos(y)) -
               psi / (psi - phi) * std::exp(phi * (y - x0)) *
                   (std::sin(y) + phi * std::cos(y));
    };
    double zstar = num::bisect(u0, x0 + M_PI_2 + 1e-9, 2.0 * M_PI - 1e-12, 1e-14);

    UcLinear uc(ex, x0);
    double lam = std::cos(zstar) / uc.value(zstar);

    Solution sol;
    sol.regime = Regime::PeriodicMultiBoundary;
    sol.c_star = x0;
    // thresholds on [-2 pi, 2 pi]: continuation around each odd multiple of pi
    double zs = zstar;
    sol.thresholds = {-zs, zs - 2.0 * M_PI, 2.0 * M_PI - zs, zs};
    std::sort(sol.thresholds.begin(), sol.thresholds.end());
    sol.lambda_star = lam;
    sol.generator = {GeneratorDescriptor::Kind::PeriodicSwitch, p.kappa, x0,
                     2.0 * M_PI, {0.0, M_PI}};
    Exponents e2 = ex;
    sol.value = [e2, lam, zs](double y) {
        // continuation iff y mod 2 pi lies in (2 pi - z*, z*), the symmetric
        // window around the per-period minimum at pi
        double base = 2.0 * M_PI * std::floor(y / (2.0 * M_PI));
        double yy = y - base;  // [0, 2 pi)
        bool cont = (yy > 2.0 * M_PI - zs) && (yy < zs);
        if (!cont) return std::cos(y);
        return lam * UcLinear(e2, base + M_PI).value(y);
    };
    return sol;
}

/// Periodic payoff with reflection symmetry about the per-period minimizer
/// x0 = x1 + period/2 (x1 a maximizer). Reduces to a per-period two-sided rule.
inline Solution solve_symmetric_periodic(const AmbiguityParams& p,
                                         const Payoff& payoff, double period,
                                         double x1) {
    if (!(period > 0)) throw ParameterError("period must be > 0");
    Exponents e = compute_exponents(p);
    double x0 = x1 + 0.5 * period;
    for (double dx : {0.1 * period, 0.23 * period, 0.41 * period}) {
        if (std::abs(payoff(x0 - dx) - payoff(x0 + dx)) > 1e-10)
            throw SymmetryViolation("solve_symmetric_periodic: payoff not symmetric about x0");
        if (std::abs(payoff(x1 + dx) - payoff(x1 + dx + period)) > 1e-10)
            throw SymmetryViolation("solve_symmetric_periodic: payoff not periodic");
    }
    UcLinear uc(e, x0);
    auto ratio = [&](double wv) { return payoff(wv) / uc.value(wv); };
    // interior maximizer on [x0, x1 + period]
    double lo = x0 + 1e-9, hi = x1 + period - 1e-12;
    int ng = 400, ibest = 0;
    double best = -kInf;
    for (int i = 0; i <= ng; ++i) {
        double wv = lo + (hi - lo) * i / ng;
        double v = ratio(wv);
        if (v > best) {
            best = v;
            ibest = i;
        }
    }
    double ga = lo + (hi - lo) * std::max(0, ibest - 1) / ng;
    double gb = lo + (hi - lo) * std::min(ng, ibest + 1) / ng;
    auto [xstar, lam] = num::golden_max(ratio, ga, gb, 1e-12);

    Solution sol;
    sol.regime = Regime::PeriodicMultiBoundary;
    sol.c_star = x0;
    sol.lambda_star = lam;
    // thresholds over two base periods
    for (int n = -1; n <= 0; ++n) {
        sol.thresholds.push_back(2.0 * x0 - xstar + n * period);
        sol.thresholds.push_back(xstar + n * period);
    }
    std::sort(sol.thresholds.begin(), sol.thresholds.end());
    sol.generator = {GeneratorDescriptor::Kind::PeriodicSwitch, p.kappa, x0, period,
                     {x1, x0}};
    double xs = xstar;
    sol.value = [e, lam, xs, x0, period, payoff](double y) {
        double k = std::round((y - x0) / period);
        double x0l = x0 + k * period;
        double yl = y - k * period;
        bool cont = (yl > 2.0 * x0 - xs) && (yl < xs);
        if (!cont) return payoff(y);
        return lam * UcLinear(e, x0l).value(y);
    };
    return sol;
}

// ---------------------------------------------------------------------------
// Stationary law of the worst-case reduced dynamics (broken-drift BM)
// ---------------------------------------------------------------------------

inline double stationary_density_linear(const AmbiguityParams& p, double c,
                                        double y) {
    p.validate_linear();
    if (p.kappa == 0.0)
        throw NoStationaryLaw("no stationary law without ambiguity");
    double rate = 2.0 * p.kappa / p.a_norm;
    return 0.5 * rate * std::exp(-rate * std::abs(y - c));
}

}  // namespace ambistop::linear

#endif  // AMBISTOP_LINEAR_HPP
