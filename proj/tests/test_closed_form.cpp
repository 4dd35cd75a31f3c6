#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "lieosc/catalog.hpp"
#include "lieosc/closed_form.hpp"
#include "lieosc/lie_system.hpp"

using namespace lieosc;

TEST_CASE("fundamental matrix at t = 0 is the identity") {
    const auto sys = make_reduced(1.0, 0.5, 1.0, TimeFunction::constant(2.0));
    CHECK(testutil::max_entry_diff(fundamental_matrix(sys, 0.0), GroupElement::identity()) ==
          0.0);
}

TEST_CASE("fundamental matrix reproduces the damped-oscillator flow") {
    // c0 = c2 = 1, c1 = mu/omega, D = omega: entries are the cosh/sinh
    // combination with wbar = sqrt(mu^2/4 - omega^2) read in tau = omega t
    const double mu = 3.0, omega = 1.0;  // hyperbolic regime
    const auto sys = make_reduced(1.0, mu / omega, 1.0, TimeFunction::constant(omega));
    const double wbar = std::sqrt(mu * mu / 4.0 - omega * omega);
    for (double t : {0.3, 1.0, 2.5}) {
        const GroupElement e = fundamental_matrix(sys, t);
        const double ch = std::cosh(wbar * t), sh = std::sinh(wbar * t);
        CHECK(e.a11 == Catch::Approx(ch + mu / (2.0 * wbar) * sh).epsilon(1e-10));
        CHECK(e.a12 == Catch::Approx(omega / wbar * sh).epsilon(1e-10));
        CHECK(e.a21 == Catch::Approx(-omega / wbar * sh).epsilon(1e-10));
        CHECK(e.a22 == Catch::Approx(ch - mu / (2.0 * wbar) * sh).epsilon(1e-10));
    }
}

TEST_CASE("fundamental matrix has unit determinant in every regime") {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (double c1 : {0.0, 1.0, 2.0, 2.0 + 1e-9, 3.5}) {  // trig, parabolic, hyperbolic
        const auto sys = make_reduced(1.0, c1, 1.0, TimeFunction::constant(1.0));
        for (double t : {0.5, 2.0, 7.0}) {
            const GroupElement e = fundamental_matrix(sys, t);
            // deep in the hyperbolic regime the entries grow to ~cosh(10),
            // where plain double rounding of the matrix itself moves the
            // determinant; hold 1e-12 where attainable, scale otherwise
            const double scale = std::max({std::abs(e.a11), std::abs(e.a12),
                                           std::abs(e.a21), std::abs(e.a22), 1.0});
            CHECK(std::abs(e.det() - 1.0) < 1e-12 + 8.0 * eps * scale * scale);
        }
        CHECK(std::abs(fundamental_matrix(sys, 1.0).det() - 1.0) < 1e-12);
    }
}

TEST_CASE("fundamental matrix solves dA/dt = D(t) C A") {
    // nonconstant D exercises the quadrature-backed tau
    const TimeFunction dfun = TimeFunction::analytic(
        [](double t) { return 1.0 + 0.3 * std::sin(t); },
        [](double t) { return 0.3 * std::cos(t); });
    const auto sys = make_reduced(1.0, 0.8, 1.0, dfun);
    const double h = 1e-5;
    double residual = 0.0;
    for (double t : {0.5, 1.5, 3.0}) {
        const GroupElement plus = fundamental_matrix(sys, t + h);
        const GroupElement minus = fundamental_matrix(sys, t - h);
        const GroupElement at = fundamental_matrix(sys, t);
        const double d = dfun(t);
        const TracelessMatrix c = sys.generator();
        // expected derivative: D(t) C A(t)
        const double da11 = d * (c.m11 * at.a11 + c.m12 * at.a21);
        const double da12 = d * (c.m11 * at.a12 + c.m12 * at.a22);
        const double da21 = d * (c.m21 * at.a11 + c.m22() * at.a21);
        const double da22 = d * (c.m21 * at.a12 + c.m22() * at.a22);
        residual = std::max(residual, std::abs((plus.a11 - minus.a11) / (2 * h) - da11));
        residual = std::max(residual, std::abs((plus.a12 - minus.a12) / (2 * h) - da12));
        residual = std::max(residual, std::abs((plus.a21 - minus.a21) / (2 * h) - da21));
        residual = std::max(residual, std::abs((plus.a22 - minus.a22) / (2 * h) - da22));
    }
    CHECK(residual < 1e-5);
}

TEST_CASE("damped oscillator: initial condition and undamped limit") {
    CHECK(ck_solution(1.0, 0.5, 2.0, {1.3, -0.4}, 0.0) == Catch::Approx(1.3).margin(1e-14));
    // mu = 0, m0 = 1: x = x0 cos(w t) + (p0/w) sin(w t)
    const double w = 1.7, x0 = 0.8, p0 = -0.5;
    for (double t : testutil::linspace(0.0, 6.0, 13)) {
        const double expect = x0 * std::cos(w * t) + p0 / w * std::sin(w * t);
        CHECK(ck_solution(1.0, 0.0, w, {x0, p0}, t) == Catch::Approx(expect).margin(1e-12));
    }
    CHECK_THROWS_AS(ck_solution(-1.0, 0.5, 1.0, {1.0, 0.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ck_solution(1.0, 0.5, 0.0, {1.0, 0.0}, 1.0), std::invalid_argument);
}

TEST_CASE("damped oscillator against the direct route, both regimes") {
    for (auto [m0, mu, omega] : {std::array{1.0, 0.5, 2.0}, std::array{1.0, 3.0, 1.0}}) {
        const auto fam = make_family("caldirola-kanai",
                                     {{"m0", m0}, {"mu", mu}, {"omega", omega}}, 0.0, 10.0);
        const auto grid = testutil::linspace(0.0, 10.0, 401);
        const auto oracle = testutil::rk_oracle(fam.coeffs, {1.0, 0.0}, grid);
        const double sup = testutil::sup_x(oracle);
        double maxd = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            maxd = std::max(maxd, std::abs(ck_solution(m0, mu, omega, {1.0, 0.0}, grid[i]) -
                                           oracle.states[i].x));
        CHECK(maxd / sup < 1e-6);
    }
}

TEST_CASE("damped oscillator is continuous across the regime boundary") {
    const double omega = 2.0;
    const double xa = ck_solution(1.0, 2.0 * omega + 1e-4, omega, {1.0, 0.0}, 5.0);
    const double xb = ck_solution(1.0, 2.0 * omega - 1e-4, omega, {1.0, 0.0}, 5.0);
    const double xc = ck_solution(1.0, 2.0 * omega, omega, {1.0, 0.0}, 5.0);
    CHECK(std::abs(xa - xb) < 1e-5);
    CHECK(((xc <= std::max(xa, xb)) && (xc >= std::min(xa, xb))));
}

TEST_CASE("inverse-square frequency: initial condition and oracle") {
    const double L = 2.0, c1 = 0.3, omega = 1.0;
    CHECK(powerlaw2_solution(L, c1, omega, {1.0, 0.0}, 0.0) == Catch::Approx(1.0).margin(1e-14));

    const auto fam = make_family("powerlaw2", {{"L", L}, {"c1", c1}, {"omega", omega}},
                                 0.0, 5.0);
    const auto grid = testutil::linspace(0.0, 5.0, 401);
    const auto oracle = testutil::rk_oracle(fam.coeffs, {1.0, 0.0}, grid);
    const double sup = testutil::sup_x(oracle);
    double maxd = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        maxd = std::max(maxd, std::abs(powerlaw2_solution(L, c1, omega, {1.0, 0.0}, grid[i]) -
                                       oracle.states[i].x));
    CHECK(maxd / sup < 1e-6);

    // membership in the reducible family with the same c1
    const auto rep = detect_kcond(fam.coeffs, grid, 1e-8);
    REQUIRE(rep.family == IntegrableFamily::kcond);
    CHECK(rep.c1 == Catch::Approx(c1).margin(1e-10));
}

TEST_CASE("inverse-square frequency reports its blow-up time") {
    try {
        powerlaw2_solution(2.0, 0.3, 1.0, {1.0, 0.0}, 7.0);  // blow-up at 2/(0.3) = 6.67
        FAIL("expected domain_error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("6.66") != std::string::npos);
    }
    CHECK_THROWS_AS(powerlaw2_solution(2.0, 0.0, 1.0, {1.0, 0.0}, 1.0), std::invalid_argument);
}

TEST_CASE("inverse-quartic frequency: initial condition, oracle, degenerate member") {
    const double u0 = 1.0, u1 = 0.5, omega = 2.0;
    CHECK(quartic_solution(u0, u1, omega, {1.0, 0.0}, 0.0) == Catch::Approx(1.0).margin(1e-14));

    const auto fam = make_family("quartic", {{"u0", u0}, {"u1", u1}, {"omega", omega}},
                                 0.0, 10.0);
    const auto grid = testutil::linspace(0.0, 10.0, 401);
    const auto oracle = testutil::rk_oracle(fam.coeffs, {1.0, 0.0}, grid);
    const double sup = testutil::sup_x(oracle);
    double maxd = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        maxd = std::max(maxd, std::abs(quartic_solution(u0, u1, omega, {1.0, 0.0}, grid[i]) -
                                       oracle.states[i].x));
    CHECK(maxd / sup < 1e-6);

    // u1 = 0 degenerates to the plain constant oscillator
    for (double t : testutil::linspace(0.0, 5.0, 11)) {
        const double expect = std::cos(omega * t) + 0.25 / omega * std::sin(omega * t);
        CHECK(quartic_solution(1.0, 0.0, omega, {1.0, 0.25}, t) ==
              Catch::Approx(expect).margin(1e-12));
    }
}

TEST_CASE("inverse-quartic frequency reports its blow-up time") {
    try {
        quartic_solution(1.0, -0.25, 1.0, {1.0, 0.0}, 5.0);  // V = 0 at t = 4
        FAIL("expected domain_error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("4.0") != std::string::npos);
    }
}

TEST_CASE("all three families agree with the group-equation pipeline") {
    struct Case {
        const char* name;
        std::map<std::string, double> params;
        double t1;
    };
    const Case cases[] = {
        {"caldirola-kanai", {{"m0", 1.0}, {"mu", 0.5}, {"omega", 2.0}}, 10.0},
        {"powerlaw2", {{"L", 2.0}, {"c1", 0.3}, {"omega", 1.0}}, 5.0},
        {"quartic", {{"u0", 1.0}, {"u1", 0.5}, {"omega", 2.0}}, 10.0},
    };
    for (const auto& c : cases) {
        const auto fam = make_family(c.name, c.params, 0.0, c.t1);
        const auto grid = testutil::linspace(0.0, c.t1, 201);
        const PhaseState xi0{0.7, -0.3};
        const auto traj = flow_state(integrate_group(fam.coeffs, grid), xi0);
        const double sup = testutil::sup_x(traj);
        double maxd = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            maxd = std::max(maxd,
                            std::abs(fam.closed_form_position(xi0, grid[i]) - traj.states[i].x));
        CHECK(maxd / sup < 1e-6);
    }
}
