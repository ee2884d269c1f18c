#ifndef AMBISTOP_PDE_HPP
#define AMBISTOP_PDE_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "ambistop/core.hpp"
#include "ambistop/numerics.hpp"

namespace ambistop::pde {

struct Grid1D {
    double lo = 0.0;
    double hi = 1.0;
    int n = 4001;

    void validate() const {
        if (!(lo < hi)) throw ParameterError("Grid1D: lo must be < hi");
        if (n < 101) throw ParameterError("Grid1D: n must be >= 101");
    }
    double h() const { return (hi - lo) / (n - 1); }
    double node(int i) const { return lo + i * h(); }
};

struct GridSolution {
    Grid1D grid;
    std::vector<double> values;
    std::vector<double> payoff;
    std::vector<std::uint8_t> stopping_mask;
    std::vector<double> detected_thresholds;
    long sweeps = 0;
    bool boundary_touches_grid_end = false;
};

namespace detail {

// Tridiagonal solve for a[i] x[i-1] + b[i] x[i] + c[i] x[i+1] = d[i]
// (Thomas algorithm; b must dominate, which holds for the rows built below).
inline void thomas(const std::vector<double>& a, std::vector<double>& b,
                   const std::vector<double>& c, std::vector<double>& d,
                   std::vector<double>& x) {
    const int n = static_cast<int>(b.size());
    for (int i = 1; i < n; ++i) {
        double m = a[i] / b[i - 1];
        b[i] -= m * c[i - 1];
        d[i] -= m * d[i - 1];
    }
    x[n - 1] = d[n - 1] / b[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
}

// Upwind discretization of the obstacle problem
//   max( sigma2(y)/2 v'' + (mu0(y) - amb(y) sgn(v')) v' - r v , F - v ) = 0
// solved by policy iteration over the stop/continue decision and the drift
// sign: each iteration freezes both controls from the current iterate,
// assembles the resulting tridiagonal system (stop rows pin the payoff,
// continue rows impose the generator equation) and solves it exactly, so the
// cost per iteration is linear in the grid size and the iteration count does
// not grow with refinement. radial_lo selects a zero-flux closure at the left
// end (entrance boundary); the right end always enforces the payoff.
template <class Sigma2, class Mu0, class Amb>
GridSolution psor_solve(const Grid1D& g, const Payoff& payoff, double r,
                        Sigma2&& sigma2, Mu0&& mu0, Amb&& amb, bool radial_lo,
                        double tol, long max_sweeps,
                        const std::vector<double>* init) {
    g.validate();
    const int n = g.n;
    const double h = g.h();
    GridSolution out;
    out.grid = g;
    out.payoff.resize(n);
    for (int i = 0; i < n; ++i) out.payoff[i] = payoff(g.node(i));
    std::vector<double>& v = out.values;
    if (init) {
        v = *init;
        for (int i = 0; i < n; ++i) v[i] = std::max(v[i], out.payoff[i]);
    } else {
        v = out.payoff;
    }
    v[n - 1] = out.payoff[n - 1];

    std::vector<double> half_sig(n), drift0(n), ambc(n);
    for (int i = 0; i < n; ++i) {
        double y = g.node(i);
        half_sig[i] = 0.5 * sigma2(y) / (h * h);
        drift0[i] = mu0(y);
        ambc[i] = amb(y);
    }

    std::vector<double> la(n), lb(n), lc(n), ld(n), vn(n);
    long sweep = 0;
    bool converged = false;
    for (; sweep < max_sweeps; ++sweep) {
        // Freeze controls from the current iterate, then solve exactly.
        for (int i = 1; i < n - 1; ++i) {
            double dv = v[i + 1] - v[i - 1];
            double mu = drift0[i] - ambc[i] * num::sgn(dv);
            double lowc = half_sig[i], upc = half_sig[i];
            if (mu >= 0)
                upc += mu / h;
            else
                lowc -= mu / h;
            double diag = lowc + upc + r;
            bool stop = out.payoff[i] * diag >= lowc * v[i - 1] + upc * v[i + 1];
            if (stop) {
                la[i] = 0.0;
                lb[i] = 1.0;
                lc[i] = 0.0;
                ld[i] = out.payoff[i];
            } else {
                la[i] = -lowc;
                lb[i] = diag;
                lc[i] = -upc;
                ld[i] = 0.0;
            }
        }
        la[0] = 0.0;
        if (radial_lo && v[1] > out.payoff[0]) {
            // Zero-flux closure, active only while continuation reaches the
            // boundary node; otherwise the obstacle binds there.
            lb[0] = 1.0;
            lc[0] = -1.0;
            ld[0] = 0.0;
        } else {
            lb[0] = 1.0;
            lc[0] = 0.0;
            ld[0] = out.payoff[0];
        }
        la[n - 1] = 0.0;
        lb[n - 1] = 1.0;
        lc[n - 1] = 0.0;
        ld[n - 1] = out.payoff[n - 1];
        thomas(la, lb, lc, ld, vn);

        double delta = 0.0;
        for (int i = 0; i < n; ++i) {
            double ch = std::abs(vn[i] - v[i]);
            if (ch > delta) delta = ch;
            v[i] = vn[i];
        }
        if (delta < tol) {
            converged = true;
            break;
        }
    }
    out.sweeps = sweep + 1;
    if (!converged) throw NoConvergence("psor_solve: iteration budget exhausted");
    // The converged policy satisfies complementarity; clip rounding-level
    // obstacle violations so downstream feasibility checks see v >= F.
    for (int i = 0; i < n; ++i) v[i] = std::max(v[i], out.payoff[i]);

    const double feas = 1e-9;
    out.stopping_mask.resize(n);
    for (int i = 0; i < n; ++i)
        out.stopping_mask[i] = v[i] <= out.payoff[i] + feas ? 1 : 0;
    for (int i = 1; i < n; ++i) {
        if (out.stopping_mask[i] != out.stopping_mask[i - 1]) {
            double g0 = v[i - 1] - out.payoff[i - 1];
            double g1 = v[i] - out.payoff[i];
            double t = g1 != g0 ? g0 / (g0 - g1) : 0.5;
            t = std::clamp(t, 0.0, 1.0);
            out.detected_thresholds.push_back(g.node(i - 1) + t * h);
        }
    }
    out.boundary_touches_grid_end =
        out.stopping_mask.front() == 0 || out.stopping_mask.back() == 0;
    return out;
}

// Coarse-to-fine cascade: solve on nested coarsenings first and prolong the
// result as the initial iterate of the next refinement.
template <class SolveOn>
GridSolution cascade(const Grid1D& g, SolveOn&& solve_on) {
    if (g.n <= 2001 || (g.n - 1) % 2 != 0) return solve_on(g, nullptr);
    Grid1D coarse = g;
    coarse.n = (g.n - 1) / 2 + 1;
    GridSolution cs = cascade(coarse, solve_on);
    std::vector<double> init(g.n);
    for (int i = 0; i < g.n; ++i) {
        if (i % 2 == 0)
            init[i] = cs.values[i / 2];
        else
            init[i] = 0.5 * (cs.values[i / 2] + cs.values[i / 2 + 1]);
    }
    return solve_on(g, &init);
}

}  // namespace detail

/// Finite-difference solve of the reduced linear-case stopping inequality
///   max( |a|^2/2 v'' - kappa |a| sgn(v') v' - r v , F - v ) = 0.
inline GridSolution solve_vi_linear(const AmbiguityParams& p, const Payoff& payoff,
                                    const Grid1D& g, double tol = 1e-12,
                                    long max_sweeps = 2000000) {
    p.validate_linear();
    double s2 = p.a_norm * p.a_norm;
    double amb = p.kappa * p.a_norm;
    return detail::cascade(g, [&](const Grid1D& gg, const std::vector<double>* init) {
        return detail::psor_solve(
            gg, payoff, p.r, [&](double) { return s2; },
            [&](double) { return 0.0; }, [&](double) { return amb; }, false, tol,
            max_sweeps, init);
    });
}

/// Radial counterpart:
///   max( 2y v'' + (d - 2 kappa sqrt(y) sgn(v')) v' - r v , F - v ) = 0
/// with a zero-flux closure at the entrance end g.lo > 0.
inline GridSolution solve_vi_radial(const AmbiguityParams& p, const Payoff& payoff,
                                    const Grid1D& g, double tol = 1e-12,
                                    long max_sweeps = 2000000) {
    p.validate_radial();
    if (!(g.lo > 0)) throw ParameterError("solve_vi_radial: grid must start above 0");
    return detail::cascade(g, [&](const Grid1D& gg, const std::vector<double>* init) {
        return detail::psor_solve(
            gg, payoff, p.r, [&](double y) { return 4.0 * y; },
            [&](double) { return double(p.dim); },
            [&](double y) { return 2.0 * p.kappa * std::sqrt(y); }, true, tol,
            max_sweeps, init);
    });
}

}  // namespace ambistop::pde

#endif  // AMBISTOP_PDE_HPP
