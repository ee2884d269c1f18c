#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ambistop/linear.hpp"
#include "ambistop/numerics.hpp"
#include "oracles.hpp"

using namespace ambistop;
namespace lin = ambistop::linear;

namespace {

AmbiguityParams fig_params(double kappa = 0.01) {
    AmbiguityParams p;
    p.kappa = kappa;
    p.r = 0.02;
    p.a_norm = 0.1;
    return p;
}

}  // namespace

TEST_CASE("exponent roots", "[linear]") {
    AmbiguityParams p = fig_params();
    lin::Exponents e = lin::compute_exponents(p);
    // Vieta for (1/2)|a|^2 b^2 - kappa |a| b - r = 0
    REQUIRE(e.psi + e.phi == Catch::Approx(2.0 * p.kappa / p.a_norm).epsilon(1e-12));
    REQUIRE(e.psi * e.phi ==
            Catch::Approx(-2.0 * p.r / (p.a_norm * p.a_norm)).epsilon(1e-12));
    REQUIRE(e.psi_hat == Catch::Approx(-e.phi));
    REQUIRE(e.phi_hat == Catch::Approx(-e.psi));

    AmbiguityParams p0 = fig_params(0.0);
    lin::Exponents e0 = lin::compute_exponents(p0);
    REQUIRE(e0.psi == Catch::Approx(std::sqrt(2.0 * p0.r) / p0.a_norm).epsilon(1e-14));
    REQUIRE(e0.phi == Catch::Approx(-e0.psi).epsilon(1e-14));
}

TEST_CASE("U_c normalization, smoothness and convexity", "[linear]") {
    AmbiguityParams p = fig_params();
    lin::Exponents e = lin::compute_exponents(p);
    for (double c : {-1.2, 0.0, 0.7}) {
        lin::UcLinear uc(e, c);
        REQUIRE(uc.value(c) == Catch::Approx(1.0).epsilon(1e-14));
        REQUIRE(std::abs(uc.h1_prime(c)) < 1e-13);
        REQUIRE(std::abs(uc.h2_prime(c)) < 1e-13);
        // both branches agree at the reference point
        REQUIRE(uc.h1(c) == Catch::Approx(uc.h2(c)).epsilon(1e-14));
        for (double y : {c - 2.0, c - 0.3, c + 0.3, c + 2.0}) {
            // convexity by second differences
            double d = 1e-3;
            double sd = uc.value(y - d) - 2.0 * uc.value(y) + uc.value(y + d);
            REQUIRE(sd > 0.0);
            REQUIRE(uc.value(y) >= 1.0);
        }
    }
}

TEST_CASE("U_c solves the worst-case ODE", "[linear]") {
    AmbiguityParams p = fig_params();
    lin::Exponents e = lin::compute_exponents(p);
    for (double c : {-0.5, 0.0, 1.1}) {
        lin::UcLinear uc(e, c);
        for (double y : {c - 1.7, c - 0.2, c + 0.4, c + 2.3}) {
            double u = uc.value(y), up = uc.deriv(y), upp = uc.second(y);
            double res = 0.5 * p.a_norm * p.a_norm * upp -
                         p.kappa * p.a_norm * std::abs(up) - p.r * u;
            double scale = std::abs(0.5 * p.a_norm * p.a_norm * upp) +
                           std::abs(p.kappa * p.a_norm * up) + std::abs(p.r * u);
            REQUIRE(std::abs(res) <= 1e-10 * scale);
        }
    }
    // infinite reference points degenerate to single exponentials
    lin::UcLinear lo(e, -kInf), hi(e, kInf);
    REQUIRE(lo.value(0.3) == Catch::Approx(std::exp(e.psi * 0.3)).epsilon(1e-14));
    REQUIRE(hi.value(0.3) == Catch::Approx(std::exp(e.phi_hat * 0.3)).epsilon(1e-14));
}

TEST_CASE("digital smooth-fit regime reproduces reference thresholds", "[linear]") {
    AmbiguityParams p = fig_params();
    Payoff f = Payoff::digital_asymmetric(1.0, 0.5, 0.35);
    Solution sol = lin::solve_digital(p, f);
    REQUIRE(sol.regime == Regime::DigitalSmoothFit);
    REQUIRE(sol.c_star == Catch::Approx(-0.0941818).margin(1e-4));
    REQUIRE(sol.thresholds[0] == Catch::Approx(-0.616587).margin(1e-4));
    REQUIRE(sol.thresholds[1] == Catch::Approx(0.205943).margin(1e-4));

    // smooth fit: lambda U' matches the payoff slope at both boundaries
    lin::Exponents e = lin::compute_exponents(p);
    lin::UcLinear uc(e, sol.c_star);
    double lam = sol.lambda_star;
    REQUIRE(lam * uc.deriv(sol.thresholds[1]) == Catch::Approx(0.5).epsilon(1e-6));
    REQUIRE(lam * uc.deriv(sol.thresholds[0]) == Catch::Approx(-1.0).epsilon(1e-6));
    // value continuity at the boundaries
    REQUIRE(sol.value(sol.thresholds[1] - 1e-12) ==
            Catch::Approx(f(sol.thresholds[1])).epsilon(1e-8));
    REQUIRE(sol.value(sol.thresholds[0] + 1e-12) ==
            Catch::Approx(f(sol.thresholds[0])).epsilon(1e-8));
}

TEST_CASE("digital kink regime pins the boundary at the jump", "[linear]") {
    AmbiguityParams p = fig_params();
    Payoff f = Payoff::digital_asymmetric(1.0, 0.5, 0.7);
    Solution sol = lin::solve_digital(p, f);
    REQUIRE(sol.regime == Regime::DigitalKinkAtZero);
    REQUIRE(sol.c_star == Catch::Approx(-0.3485973436105034).margin(1e-6));
    REQUIRE(sol.thresholds[0] == Catch::Approx(-0.7397691939677733).margin(1e-6));
    REQUIRE(sol.thresholds[1] == 0.0);

    lin::Exponents e = lin::compute_exponents(p);
    lin::UcLinear uc(e, sol.c_star);
    // smooth fit holds at the lower boundary only
    REQUIRE(sol.lambda_star * uc.deriv(sol.thresholds[0]) ==
            Catch::Approx(-1.0).epsilon(1e-6));
    REQUIRE(sol.lambda_star * uc.value(0.0) == Catch::Approx(0.7).epsilon(1e-10));
    // the majorant kinks upward through the discontinuity: left slope below
    // the right payoff slope would violate optimality
    REQUIRE(sol.lambda_star * uc.deriv(0.0) >= 0.5);
}

TEST_CASE("even kink payoff: symmetric rule with tangency", "[linear]") {
    AmbiguityParams p = fig_params();
    Payoff f = Payoff::even_kink(1.0);
    Solution sol = lin::solve_even(p, f);
    REQUIRE(sol.regime == Regime::SymmetricTwoSided);
    REQUIRE(sol.c_star == 0.0);
    double xs = sol.thresholds[1];
    REQUIRE(xs == Catch::Approx(-sol.thresholds[0]).epsilon(1e-12));
    lin::Exponents e = lin::compute_exponents(p);
    lin::UcLinear uc(e, 0.0);
    // first-order condition U_0(x*) = x* U_0'(x*) of the ratio maximum
    REQUIRE(uc.value(xs) == Catch::Approx(xs * uc.deriv(xs)).epsilon(1e-7));
    REQUIRE(sol.lambda_star == Catch::Approx(f(xs) / uc.value(xs)).epsilon(1e-12));

    Payoff skew = Payoff::user_table({{-1.0, 0.0}, {0.0, 1.0}, {2.0, 0.0}});
    REQUIRE_THROWS_AS(lin::solve_even(p, skew), NotEven);
}

TEST_CASE("representation value agrees with closed-form solvers", "[linear]") {
    AmbiguityParams p = fig_params();
    Payoff f = Payoff::even_kink(1.0);
    Solution sol = lin::solve_even(p, f);
    for (double y : {0.0, 0.15, -0.32}) {
        lin::RepresentationResult rep = lin::value_via_representation(p, f, y);
        REQUIRE(rep.value == Catch::Approx(sol.value(y)).epsilon(1e-6));
    }
    Payoff dig = Payoff::digital_asymmetric(1.0, 0.5, 0.35);
    Solution ds = lin::solve_digital(p, dig);
    for (double y : {-0.2, 0.05}) {
        lin::RepresentationResult rep = lin::value_via_representation(p, dig, y);
        REQUIRE(rep.value == Catch::Approx(ds.value(y)).epsilon(1e-5));
    }
}

TEST_CASE("periodic cosine thresholds", "[linear]") {
    AmbiguityParams p;
    p.kappa = 0.02;
    p.r = 0.03;
    p.a_norm = 0.1;
    Solution sol = lin::solve_periodic_cosine(p);
    REQUIRE(sol.regime == Regime::PeriodicMultiBoundary);
    double zs = 5.072329948341164;
    REQUIRE(sol.thresholds[0] == Catch::Approx(-zs).margin(1e-9));
    REQUIRE(sol.thresholds[1] == Catch::Approx(zs - 2.0 * M_PI).margin(1e-9));
    REQUIRE(sol.thresholds[2] == Catch::Approx(2.0 * M_PI - zs).margin(1e-9));
    REQUIRE(sol.thresholds[3] == Catch::Approx(zs).margin(1e-9));
    // stopping value at maxima, interior dominance, periodicity
    REQUIRE(sol.value(0.0) == 1.0);
    REQUIRE(sol.value(M_PI) == Catch::Approx(sol.lambda_star).epsilon(1e-12));
    for (int i = 0; i <= 200; ++i) {
        double y = -2.0 * M_PI + 4.0 * M_PI * i / 200.0;
        REQUIRE(sol.value(y) >= std::cos(y) - 1e-10);
        REQUIRE(sol.value(y) == Catch::Approx(sol.value(y + 2.0 * M_PI)).margin(1e-10));
    }
}

TEST_CASE("symmetric periodic solver matches the cosine specialization", "[linear]") {
    AmbiguityParams p;
    p.kappa = 0.02;
    p.r = 0.03;
    p.a_norm = 0.1;
    Solution ref = lin::solve_periodic_cosine(p);
    Solution gen = lin::solve_symmetric_periodic(p, Payoff::periodic_cosine(),
                                                 2.0 * M_PI, 0.0);
    REQUIRE(gen.lambda_star == Catch::Approx(ref.lambda_star).epsilon(1e-10));
    REQUIRE(gen.thresholds.size() == 4);
    for (int i = 0; i < 4; ++i)
        REQUIRE(gen.thresholds[i] == Catch::Approx(ref.thresholds[i]).margin(1e-8));
    for (double y : {-4.0, -1.0, 0.0, 2.2, 3.14, 5.9})
        REQUIRE(gen.value(y) == Catch::Approx(ref.value(y)).margin(1e-10));

    Payoff skew = Payoff::user_table({{0.0, 1.0}, {1.0, 0.5}, {2.0, 0.9}});
    REQUIRE_THROWS_AS(lin::solve_symmetric_periodic(p, skew, 2.0, 0.0),
                      SymmetryViolation);
}

TEST_CASE("ambiguity accelerates stopping", "[linear]") {
    Payoff f = Payoff::digital_asymmetric(1.0, 0.5, 0.35);
    double prev_val = kInf, prev_lo = -kInf, prev_hi = kInf;
    for (double kappa : {0.0, 0.01, 0.02, 0.05}) {
        Solution sol = lin::solve_digital(fig_params(kappa), f);
        double val = sol.value(0.0);
        REQUIRE(val <= prev_val + 1e-12);
        // continuation sets are nested decreasing in kappa
        REQUIRE(sol.thresholds[0] >= prev_lo - 1e-10);
        REQUIRE(sol.thresholds[1] <= prev_hi + 1e-10);
        prev_val = val;
        prev_lo = sol.thresholds[0];
        prev_hi = sol.thresholds[1];
    }
}

TEST_CASE("value dominates the payoff everywhere", "[linear]") {
    AmbiguityParams p = fig_params();
    Payoff f = Payoff::digital_asymmetric(1.0, 0.5, 0.35);
    Solution sol = lin::solve_digital(p, f);
    for (int i = 0; i <= 10000; ++i) {
        double y = -2.0 + 4.0 * i / 10000.0;
        REQUIRE(sol.value(y) >= f(y) - 1e-10);
    }
}

TEST_CASE("stationary law of the worst-case linear dynamics", "[linear]") {
    AmbiguityParams p = fig_params();
    double c = -0.3;
    double span = 45.0 * p.a_norm / (2.0 * p.kappa);  // tail mass e^{-45}
    double mass = num::integrate(
        [&](double y) { return lin::stationary_density_linear(p, c, y); },
        c - span, c + span, 1e-10);
    REQUIRE(mass == Catch::Approx(1.0).epsilon(1e-8));
    // Laplace shape: mode at c, symmetric decay at rate 2 kappa / |a|
    double rate = 2.0 * p.kappa / p.a_norm;
    REQUIRE(lin::stationary_density_linear(p, c, c) ==
            Catch::Approx(0.5 * rate).epsilon(1e-12));
    REQUIRE(lin::stationary_density_linear(p, c, c + 1.0) ==
            Catch::Approx(lin::stationary_density_linear(p, c, c - 1.0)).epsilon(1e-12));
    AmbiguityParams p0 = fig_params(0.0);
    REQUIRE_THROWS_AS(lin::stationary_density_linear(p0, 0.0, 0.0), NoStationaryLaw);
}
