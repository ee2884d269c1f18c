#ifndef AMBISTOP_SOLVE_HPP
#define AMBISTOP_SOLVE_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "ambistop/core.hpp"
#include "ambistop/json_io.hpp"
#include "ambistop/linear.hpp"
#include "ambistop/radial.hpp"

namespace ambistop {

/// A solved problem together with the continuation region as a union of open
/// intervals in the reduced coordinate (periodic cases report the window
/// [-2 periods, 2 periods]).
struct SolveOutcome {
    bool radial = false;
    Solution sol;
    std::vector<std::pair<double, double>> continuation;
};

namespace detail {

inline Solution straddle_to_solution(const radial::StraddleSolution& s) {
    Solution sol;
    sol.regime = s.regime;
    sol.c_star = s.c_star;
    if (s.y2_star)
        sol.thresholds = {*s.y2_star, s.y1_star};
    else
        sol.thresholds = {s.y1_star};
    sol.lambda_star = s.lambda_star;
    sol.value = s.value;
    sol.generator = s.generator;
    return sol;
}

// Recover continuation intervals by scanning value > payoff on a fine grid.
inline std::vector<std::pair<double, double>> continuation_by_scan(
    const Solution& sol, const Payoff& payoff, double lo, double hi) {
    const int n = 4001;
    std::vector<std::pair<double, double>> out;
    bool in = false;
    double start = 0.0;
    for (int i = 0; i < n; ++i) {
        double y = lo + (hi - lo) * i / (n - 1.0);
        double f = payoff(y);
        bool cont = sol.value(y) > f + 1e-9 * std::max(1.0, std::abs(f));
        if (cont && !in) {
            in = true;
            start = y;
        } else if (!cont && in) {
            in = false;
            out.emplace_back(start, y);
        }
    }
    if (in) out.emplace_back(start, hi);
    return out;
}

}  // namespace detail

inline SolveOutcome solve_problem(const io::ProblemSpec& ps) {
    SolveOutcome out;
    out.radial = ps.radial;
    if (!ps.radial) {
        switch (ps.payoff.kind()) {
            case PayoffKind::DigitalAsymmetric:
                out.sol = linear::solve_digital(ps.params, ps.payoff);
                out.continuation = {{out.sol.thresholds[0], out.sol.thresholds[1]}};
                return out;
            case PayoffKind::EvenKink:
                out.sol = linear::solve_even(ps.params, ps.payoff);
                out.continuation = {{out.sol.thresholds[0], out.sol.thresholds[1]}};
                return out;
            case PayoffKind::PeriodicCosine: {
                out.sol = linear::solve_periodic_cosine(ps.params);
                const auto& t = out.sol.thresholds;
                out.continuation = {{t[0], t[1]}, {t[2], t[3]}};
                return out;
            }
            case PayoffKind::UserTable: {
                bool even = true;
                for (double y : {0.3, 0.7, 1.3, 2.9}) {
                    if (std::abs(ps.payoff(y) - ps.payoff(-y)) >
                        1e-12 * std::max(1.0, std::abs(ps.payoff(y)))) {
                        even = false;
                        break;
                    }
                }
                if (even) {
                    try {
                        out.sol = linear::solve_even(ps.params, ps.payoff);
                        out.continuation = {
                            {out.sol.thresholds[0], out.sol.thresholds[1]}};
                        return out;
                    } catch (const SolverError&) {
                        // fall through to the generic representation
                    }
                }
                double L = 10.0;
                if (!ps.payoff.table().empty())
                    L = std::max(10.0, 2.0 * std::max(
                                           std::abs(ps.payoff.table().front().first),
                                           std::abs(ps.payoff.table().back().first)));
                auto rep = linear::value_via_representation(ps.params, ps.payoff, 0.0);
                Solution sol;
                sol.regime = Regime::GenericRepresentation;
                sol.c_star = rep.c_star;
                sol.lambda_star = rep.lambda_star;
                linear::Exponents e = linear::compute_exponents(ps.params);
                double lam = rep.lambda_star, c = rep.c_star;
                Payoff pay = ps.payoff;
                sol.value = [e, lam, c, pay](double y) {
                    return std::max(lam * linear::UcLinear(e, c).value(y), pay(y));
                };
                sol.generator = {GeneratorDescriptor::Kind::SignSwitchLinear,
                                 ps.params.kappa, std::isfinite(c) ? c : 0.0, 0.0, {}};
                out.sol = std::move(sol);
                out.continuation =
                    detail::continuation_by_scan(out.sol, ps.payoff, -L, L);
                for (const auto& iv : out.continuation)
                    out.sol.thresholds.insert(out.sol.thresholds.end(),
                                              {iv.first, iv.second});
                return out;
            }
            default:
                throw SpecError("payoff kind not supported in the linear case");
        }
    }
    switch (ps.payoff.kind()) {
        case PayoffKind::Straddle: {
            radial::StraddleSolution s =
                radial::solve_straddle(ps.params, ps.payoff.strike());
            out.sol = detail::straddle_to_solution(s);
            if (s.y2_star)
                out.continuation = {{*s.y2_star, s.y1_star}};
            else
                out.continuation = {{-kInf, s.y1_star}};
            return out;
        }
        case PayoffKind::IdentityRadial:
        case PayoffKind::UserTable: {
            out.sol = radial::solve_radial_representation(ps.params, ps.payoff);
            double hi = out.sol.thresholds.empty() ? 100.0
                                                   : 4.0 * out.sol.thresholds[0];
            out.continuation =
                detail::continuation_by_scan(out.sol, ps.payoff, 1e-8, hi);
            return out;
        }
        default:
            throw SpecError("payoff kind not supported in the radial case");
    }
}

}  // namespace ambistop

#endif  // AMBISTOP_SOLVE_HPP
