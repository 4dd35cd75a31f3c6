#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "lieosc/ode.hpp"
#include "lieosc/sl2.hpp"
#include "lieosc/time_function.hpp"

namespace lieosc {

/// A reduced constant system dxi'/dt = D(t) C xi' with
/// C = [[c1/2, c0], [-c2, -c1/2]], together with the reparametrisation
/// tau(t) = integral of D from 0 to t.
struct ReducedSystem {
    double c0 = 1.0;
    double c1 = 0.0;
    double c2 = 1.0;
    TimeFunction dfun;
    std::function<double(double)> tau;

    TracelessMatrix generator() const { return {0.5 * c1, c0, -c2}; }
};

/// Builds a reduced system whose tau is evaluated by quadrature of D.
inline ReducedSystem make_reduced(double c0, double c1, double c2, TimeFunction dfun,
                                  double quad_tol = 1e-12) {
    if (!dfun.valid()) throw std::invalid_argument("make_reduced: missing D");
    ReducedSystem sys;
    sys.c0 = c0;
    sys.c1 = c1;
    sys.c2 = c2;
    sys.dfun = dfun;
    sys.tau = [dfun, quad_tol](double t) {
        return quadrature([dfun](double s) { return dfun(s); }, 0.0, t, quad_tol);
    };
    return sys;
}

/// exp(tau(t) C): the flow of the reduced system from time 0 to t. The
/// branch (trigonometric, hyperbolic or parabolic) is picked inside
/// exp_traceless from the sign of c1^2/4 - c0 c2.
inline GroupElement fundamental_matrix(const ReducedSystem& sys, double t) {
    if (!sys.tau) throw std::invalid_argument("fundamental_matrix: missing tau");
    return exp_traceless(sys.tau(t) * sys.generator());
}

/// Damped oscillator with m(t) = m0 exp(mu t): closed-form position at time
/// t from initial data (x0, p0). Both frequency regimes and the parabolic
/// boundary mu = 2 omega are covered by the analytic continuation of the
/// cosh/sinh pair.
inline double ck_solution(double m0, double mu, double omega, const PhaseState& xi0,
                          double t) {
    if (!(m0 > 0.0)) throw std::invalid_argument("ck_solution: m0 must be positive");
    if (!(omega > 0.0)) throw std::invalid_argument("ck_solution: omega must be positive");
    const double s = std::sqrt(m0 * omega);
    const double xp0 = s * xi0.x;
    const double pp0 = xi0.p / s;
    const double c1 = mu / omega;
    const GroupElement e = exp_traceless((omega * t) * TracelessMatrix{0.5 * c1, 1.0, -1.0});
    const double xp = e.a11 * xp0 + e.a12 * pp0;
    return std::exp(-0.5 * mu * t) * xp / s;
}

/// Oscillator with frequency factor F(t) = 1/(L - c1 omega t)^2. Valid
/// until the coefficient blows up at t = L/(c1 omega).
inline double powerlaw2_solution(double L, double c1, double omega, const PhaseState& xi0,
                                 double t) {
    if (c1 == 0.0) throw std::invalid_argument("powerlaw2_solution: c1 must be nonzero");
    if (!(omega > 0.0))
        throw std::invalid_argument("powerlaw2_solution: omega must be positive");
    if (!(L > 0.0)) throw std::invalid_argument("powerlaw2_solution: L must be positive");
    const double v = L - c1 * omega * t;
    if (!(v > 0.0) || (c1 > 0.0 && t > L / (c1 * omega)))
        throw std::domain_error("powerlaw2_solution: domain ends at blow-up time t = " +
                                std::to_string(L / (c1 * omega)));
    // tau(t) = (1/c1) log(L / (L - c1 omega t)), fixed so that tau(0) = 0
    const double tau = -std::log1p(-c1 * omega * t / L) / c1;
    const double xp0 = std::sqrt(omega / L) * xi0.x;
    const double pp0 = std::sqrt(L / omega) * xi0.p;
    const GroupElement e = exp_traceless(tau * TracelessMatrix{0.5 * c1, 1.0, -1.0});
    const double xp = e.a11 * xp0 + e.a12 * pp0;
    return std::sqrt(v / omega) * xp;
}

/// Oscillator with frequency factor F(t) = 1/(u1 t + u0)^4. The u1 = 0
/// member is the plain constant oscillator; tau = t/(u0 V(t)) covers both
/// cases without a branch.
inline double quartic_solution(double u0, double u1, double omega, const PhaseState& xi0,
                               double t) {
    if (!(u0 > 0.0)) throw std::invalid_argument("quartic_solution: u0 must be positive");
    if (!(omega > 0.0)) throw std::invalid_argument("quartic_solution: omega must be positive");
    const double v = u1 * t + u0;
    if (!(v > 0.0) || (u1 < 0.0 && t > -u0 / u1))
        throw std::domain_error("quartic_solution: domain ends at blow-up time t = " +
                                std::to_string(-u0 / u1));
    const double tau = t / (u0 * v);
    const double xp0 = xi0.x / u0;
    const double pp0 = -u1 * xi0.x + u0 * xi0.p;
    const GroupElement e = exp_traceless(tau * TracelessMatrix{0.0, 1.0, -omega * omega});
    return v * (e.a11 * xp0 + e.a12 * pp0);
}

}  // namespace lieosc
