#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ambistop/numerics.hpp"
#include "ambistop/radial.hpp"
#include "oracles.hpp"

using namespace ambistop;
namespace rad = ambistop::radial;

namespace {

AmbiguityParams fig45_params(double kappa = 0.02) {
    AmbiguityParams p;
    p.kappa = kappa;
    p.r = 0.1;
    p.dim = 5;
    return p;
}

}  // namespace

TEST_CASE("radial fundamentals reproduce frozen probe values", "[radial]") {
    rad::RadialFundamentals f = rad::build_fundamentals(fig45_params());
    REQUIRE_FALSE(f.numeric_derivs);
    struct Probe {
        double y, psi1, phi1, psi2, phi2;
    };
    const Probe probes[] = {
        {0.5, 0.8096700948739182, 6.539222791990483, 0.8096194221475626,
         5.591502442891123},
        {2.0, 0.8343329121563145, 0.7660707513982151, 0.8339205291905742,
         0.6096229563665117},
        {9.0, 0.9576376886950363, 0.0606524875536811, 0.9533766410658753,
         0.04209208802429456},
        {40.0, 1.684678314539219, 0.00268394300854106, 1.628700764385423,
         0.001478287056525306},
    };
    for (const Probe& pr : probes) {
        REQUIRE(f.psi1(pr.y) == Catch::Approx(pr.psi1).epsilon(1e-10));
        REQUIRE(f.phi1(pr.y) == Catch::Approx(pr.phi1).epsilon(1e-9));
        REQUIRE(f.psi2(pr.y) == Catch::Approx(pr.psi2).epsilon(1e-10));
        REQUIRE(f.phi2(pr.y) == Catch::Approx(pr.phi2).epsilon(1e-9));
    }
    REQUIRE(f.B1 == Catch::Approx(2.7820630164703782).epsilon(1e-12));
    REQUIRE(f.B2 == Catch::Approx(2.5798583207057255).epsilon(1e-12));
    // entrance limit: psi1(0+) -> beta^{(d-1)/2}
    REQUIRE(f.psi1(1e-14) == Catch::Approx(f.pref).epsilon(1e-6));
    REQUIRE(f.pref == Catch::Approx(0.80160).epsilon(1e-4));
}

TEST_CASE("radial fundamentals: monotonicity and Wronskian constancy", "[radial]") {
    rad::RadialFundamentals f = rad::build_fundamentals(fig45_params());
    double prev_psi = 0.0, prev_phi = kInf;
    for (double y : {0.2, 1.0, 4.0, 16.0, 64.0}) {
        REQUIRE(f.psi1(y) > prev_psi);   // increasing solution
        REQUIRE(f.phi2(y) < prev_phi);   // decreasing solution
        prev_psi = f.psi1(y);
        prev_phi = f.phi2(y);
    }
    for (double y : {0.3, 1.7, 8.0, 30.0, 90.0}) {
        REQUIRE(f.wronskian1(y) == Catch::Approx(f.B1).epsilon(1e-6));
        REQUIRE(f.wronskian2(y) == Catch::Approx(f.B2).epsilon(1e-6));
    }
}

TEST_CASE("radial fundamentals solve their ODEs", "[radial]") {
    AmbiguityParams p = fig45_params();
    rad::RadialFundamentals f = rad::build_fundamentals(p);
    // index 1: 2y g'' + (d - 2 kappa sqrt(y)) g' - r g = 0; index 2 flips kappa
    auto check = [&](const std::function<double(double)>& g, double ksign) {
        for (double y : {0.6, 2.4, 11.0, 45.0}) {
            double h = 5e-3 * std::max(1.0, y);
            double g0 = g(y);
            double g1 = oracles::deriv1(g, y, h);
            double g2 = oracles::deriv2(g, y, h);
            double res = 2.0 * y * g2 +
                         (p.dim + ksign * 2.0 * p.kappa * std::sqrt(y)) * g1 -
                         p.r * g0;
            double scale = std::abs(2.0 * y * g2) + std::abs(p.dim * g1) +
                           std::abs(p.r * g0);
            REQUIRE(std::abs(res) <= 1e-8 * scale);
        }
    };
    check([&](double y) { return f.psi1(y); }, -1.0);
    check([&](double y) { return f.phi1(y); }, -1.0);
    check([&](double y) { return f.psi2(y); }, +1.0);
    check([&](double y) { return f.phi2(y); }, +1.0);
}

TEST_CASE("radial U_c invariants and worst-case ODE", "[radial]") {
    AmbiguityParams p = fig45_params();
    rad::RadialFundamentals f = rad::build_fundamentals(p);
    for (double c : {1.5, 9.0, 30.0}) {
        rad::UcRadial uc = rad::build_uc_radial(f, c);
        REQUIRE(uc.value(c) == Catch::Approx(1.0).epsilon(1e-10));
        REQUIRE(std::abs(uc.h1_prime(c)) < 1e-11);
        REQUIRE(std::abs(uc.h2_prime(c)) < 1e-11);
        REQUIRE(uc.h1(c) == Catch::Approx(uc.h2(c)).epsilon(1e-10));
        for (double y : {0.4 * c, 0.8 * c, 1.3 * c, 3.0 * c}) {
            double d = 1e-3 * std::max(1.0, y);
            double sd = uc.value(y - d) - 2.0 * uc.value(y) + uc.value(y + d);
            REQUIRE(sd > -1e-14);  // convex
            REQUIRE(uc.value(y) >= 1.0 - 1e-12);
            // combined HJB ODE: 2y u'' + d u' - 2 kappa sqrt(y) |u'| - r u = 0
            auto u = [&](double t) { return uc.value(t); };
            double h = 5e-3 * std::max(1.0, y);
            if (std::abs(y - c) < 3.0 * h) continue;  // skip the gradient kink
            double u0 = u(y), u1 = oracles::deriv1(u, y, h), u2 = oracles::deriv2(u, y, h);
            double res = 2.0 * y * u2 + p.dim * u1 -
                         2.0 * p.kappa * std::sqrt(y) * std::abs(u1) - p.r * u0;
            double scale = std::abs(2.0 * y * u2) + std::abs(p.dim * u1) +
                           std::abs(p.r * u0);
            REQUIRE(std::abs(res) <= 1e-8 * scale);
        }
    }
    // degenerate reference points
    rad::UcRadial u0 = rad::build_uc_radial(f, 0.0);
    REQUIRE(u0.value(3.0) == Catch::Approx(f.psi1(3.0)).epsilon(1e-14));
    rad::UcRadial uinf = rad::build_uc_radial(f, kInf);
    REQUIRE(uinf.value(3.0) == Catch::Approx(f.phi2(3.0)).epsilon(1e-14));
    REQUIRE_THROWS_AS(rad::build_uc_radial(f, -1.0), ParameterError);
}

TEST_CASE("straddle K=4: two-boundary solution", "[radial]") {
    rad::StraddleSolution s = rad::solve_straddle(fig45_params(), 4.0);
    REQUIRE(s.regime == Regime::TwoBoundary);
    REQUIRE(s.c_star == Catch::Approx(9.0101682193094881).epsilon(1e-6));
    REQUIRE(s.y1_star == Catch::Approx(63.436801432014079).epsilon(1e-6));
    REQUIRE(s.y2_star.has_value());
    REQUIRE(*s.y2_star == Catch::Approx(3.8993076228905519).epsilon(1e-6));
    REQUIRE(s.lambda_star == Catch::Approx(1.6777654575118386).epsilon(1e-6));

    // smooth fit at both boundaries
    rad::RadialFundamentals f = rad::build_fundamentals(fig45_params());
    rad::UcRadial uc(f, s.c_star);
    double lam = s.lambda_star;
    REQUIRE(lam * uc.deriv(s.y1_star) ==
            Catch::Approx(1.0 / (2.0 * std::sqrt(s.y1_star))).epsilon(1e-6));
    REQUIRE(lam * uc.deriv(*s.y2_star) ==
            Catch::Approx(-1.0 / (2.0 * std::sqrt(*s.y2_star))).epsilon(1e-6));
    // dominance and boundary continuity
    for (int i = 0; i <= 400; ++i) {
        double y = 0.05 + (100.0 - 0.05) * i / 400.0;
        REQUIRE(s.value(y) >= std::abs(std::sqrt(y) - 4.0) - 1e-9);
    }
    REQUIRE(s.value(s.y1_star - 1e-10) ==
            Catch::Approx(std::sqrt(s.y1_star) - 4.0).epsilon(1e-7));
    REQUIRE(s.value(*s.y2_star + 1e-10) ==
            Catch::Approx(4.0 - std::sqrt(*s.y2_star)).epsilon(1e-7));
    REQUIRE_THROWS_AS(rad::solve_straddle(fig45_params(), -1.0), ParameterError);
}

TEST_CASE("straddle K=0.85: single upper boundary", "[radial]") {
    rad::StraddleSolution s = rad::solve_straddle(fig45_params(), 0.85);
    REQUIRE(s.regime == Regime::SingleUpperBoundary);
    REQUIRE(s.c_star == 0.0);
    REQUIRE(s.y1_star == Catch::Approx(33.358273474069075).epsilon(1e-8));
    REQUIRE(s.lambda_star == Catch::Approx(3.2811238256178087).epsilon(1e-7));
    // entrance value: lambda * psi1(0+) = lambda * pref
    rad::RadialFundamentals f = rad::build_fundamentals(fig45_params());
    REQUIRE(s.lambda_star * f.pref ==
            Catch::Approx(2.6301488586152355).epsilon(1e-7));
    REQUIRE(s.value(1e-12) == Catch::Approx(2.6301488586152355).epsilon(1e-5));
    // smooth fit at the single boundary
    REQUIRE(s.lambda_star * f.psi1_prime(s.y1_star) ==
            Catch::Approx(1.0 / (2.0 * std::sqrt(s.y1_star))).epsilon(1e-8));
}

TEST_CASE("critical strike separates the regimes", "[radial]") {
    AmbiguityParams p = fig45_params();
    double kc = rad::critical_strike(p);
    REQUIRE(kc == Catch::Approx(2.0415573474231603).epsilon(1e-5));
    REQUIRE(rad::solve_straddle(p, 0.99 * kc).regime == Regime::SingleUpperBoundary);
    REQUIRE(rad::solve_straddle(p, 1.01 * kc).regime == Regime::TwoBoundary);
}

TEST_CASE("single-boundary threshold grows with the strike", "[radial]") {
    AmbiguityParams p = fig45_params();
    double prev = 0.0;
    for (double K : {0.4, 0.6, 0.85, 1.2}) {
        rad::StraddleSolution s = rad::solve_straddle(p, K);
        REQUIRE(s.regime == Regime::SingleUpperBoundary);
        REQUIRE(s.y1_star > prev);
        prev = s.y1_star;
    }
}

TEST_CASE("radial stationary law", "[radial]") {
    AmbiguityParams p;
    p.kappa = 1.0;
    p.r = 0.1;
    p.dim = 3;
    double c = 1.0;
    double mass = num::integrate(
        [&](double y) {
            return y <= 0.0 ? 0.0 : rad::stationary_density_radial(p, c, y);
        },
        0.0, 400.0, 1e-11);
    REQUIRE(mass == Catch::Approx(1.0).epsilon(1e-8));
    // density shape at the reference point: (1/2) c^{d/2-1} / normalization
    double at_c = rad::stationary_density_radial(p, c, c);
    double just_above = rad::stationary_density_radial(p, c, c + 1e-9);
    REQUIRE(at_c == Catch::Approx(just_above).epsilon(1e-6));
    AmbiguityParams p0 = p;
    p0.kappa = 0.0;
    REQUIRE_THROWS_AS(rad::stationary_density_radial(p0, c, 1.0), NoStationaryLaw);
    REQUIRE_THROWS_AS(rad::stationary_density_radial(p, -1.0, 1.0), ParameterError);
}

TEST_CASE("sandwich bounds for sup-norm ambiguity in dimension 2", "[radial]") {
    AmbiguityParams p;
    p.kappa = 0.05;
    p.r = 0.1;
    p.dim = 2;
    Payoff id = Payoff::identity_radial();
    auto [lower, upper] = rad::sandwich_bounds(p, id);
    for (double y : {0.5, 2.0, 8.0}) {
        REQUIRE(lower.value(y) <= upper.value(y) + 1e-10);
        REQUIRE(lower.value(y) >= y - 1e-10);
    }
    AmbiguityParams p0 = p;
    p0.kappa = 0.0;
    auto [l0, u0] = rad::sandwich_bounds(p0, id);
    for (double y : {0.5, 2.0, 8.0})
        REQUIRE(l0.value(y) == Catch::Approx(u0.value(y)).epsilon(1e-9));
    AmbiguityParams p3 = p;
    p3.dim = 3;
    REQUIRE_THROWS_AS(rad::sandwich_bounds(p3, id), ParameterError);
}
