#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lieosc/lie_system.hpp"
#include "lieosc/ode.hpp"
#include "lieosc/sl2.hpp"

namespace lieosc {

struct MilnePinneyState {
    double rho = 1.0;
    double rhodot = 0.0;
};

/// Thrown when the auxiliary-equation solution approaches zero, where the
/// 1/rho^3 term makes continued explicit integration meaningless.
struct RhoCollapse : std::runtime_error {
    double time;
    explicit RhoCollapse(double t)
        : std::runtime_error("Milne-Pinney solution collapsed (rho < 1e-6) at t = " +
                             std::to_string(t)),
          time(t) {}
};

/// Integrates the auxiliary equation rho'' + F(t) rho = 1/rho^3 on the
/// grid. Values are (rho, rhodot) rows.
inline SampledCurve milne_pinney_integrate(const std::function<double(double)>& freq,
                                           const MilnePinneyState& init,
                                           const std::vector<double>& grid,
                                           double rel_tol = 1e-9, double abs_tol = 1e-12) {
    if (!freq) throw std::invalid_argument("milne_pinney_integrate: missing F");
    if (!(init.rho > 0.0))
        throw std::invalid_argument("milne_pinney_integrate: initial rho must be positive");
    if (grid.size() < 2) throw std::invalid_argument("milne_pinney_integrate: grid too small");
    IvpProblem problem;
    problem.dimension = 2;
    problem.rhs = [&freq](double t, const std::vector<double>& y, std::vector<double>& dy) {
        if (y[0] < 1e-6) throw RhoCollapse(t);
        dy[0] = y[1];
        dy[1] = -freq(t) * y[0] + 1.0 / (y[0] * y[0] * y[0]);
    };
    problem.t0 = grid.front();
    problem.t1 = grid.back();
    problem.y0 = {init.rho, init.rhodot};
    problem.rel_tol = rel_tol;
    problem.abs_tol = abs_tol;
    return integrate(problem, grid);
}

/// F = (1/rho) (1/rho^3 - rhoddot), the frequency whose oscillator admits
/// the Lewis invariant built from rho.
inline double freq_from_rho(double rho, double rhoddot) {
    if (!(rho > 0.0)) throw std::domain_error("freq_from_rho: rho must be positive");
    return (1.0 / (rho * rho * rho) - rhoddot) / rho;
}

/// Convenience overload: the second derivative of rho is estimated by a
/// central second difference.
inline double freq_from_rho(const std::function<double(double)>& rho, double t) {
    if (!rho) throw std::invalid_argument("freq_from_rho: missing rho");
    constexpr double h = 1.220703125e-4;  // eps^(1/4)
    const double rhoddot = (rho(t + h) - 2.0 * rho(t) + rho(t - h)) / (h * h);
    return freq_from_rho(rho(t), rhoddot);
}

/// Lewis invariant I = [(rho p - rhodot x)^2 + (x/rho)^2] / 2.
inline double lewis_invariant(const MilnePinneyState& state, const PhaseState& xi) {
    if (!(state.rho > 0.0)) throw std::domain_error("lewis_invariant: rho must be positive");
    const double a = state.rho * xi.p - state.rhodot * xi.x;
    const double b = xi.x / state.rho;
    return 0.5 * (a * a + b * b);
}

/// A pair of first integrals; the second one is only defined on part of
/// parameter/phase space.
struct PairInvariants {
    double i1 = 0.0;
    std::optional<double> i2;
};

/// First integrals of the F = (u1 t + u0)^(-2) family, in the reduced
/// variables (x', p') of the diagonal transformation.
///
/// I1 = -(u1/omega) x' p' + x'^2 + p'^2 is global. I2 exists in closed form
/// only in the hyperbolic regime u1^2 > 4 omega^2; the conserved completion
/// used here is V^(omega/u1) * [(u1/omega + 2 wbar) x' - 2 p']^(1/wbar)
/// with wbar = sqrt(u1^2/(4 omega^2) - 1), and only on the phase-space
/// region where the bracket is positive. Outside the hyperbolic regime, at
/// u1 = 0, or off that region I2 is reported as absent rather than guessed;
/// V <= 0 is a hard domain violation.
inline PairInvariants invariants_powerlaw2(const PhaseState& xiprime, double t, double u0,
                                           double u1, double omega) {
    if (!(omega > 0.0))
        throw std::invalid_argument("invariants_powerlaw2: omega must be positive");
    PairInvariants out;
    const double xp = xiprime.x, pp = xiprime.p;
    out.i1 = -(u1 / omega) * pp * xp + xp * xp + pp * pp;
    if (u1 == 0.0) return out;
    const double disc = u1 * u1 / (4.0 * omega * omega) - 1.0;
    if (disc <= 0.0) return out;  // trigonometric regime: no closed form reported
    const double wbar = std::sqrt(disc);
    const double v = u1 * t + u0;
    if (!(v > 0.0))
        throw std::domain_error("invariants_powerlaw2: V(t) = u1 t + u0 must be positive");
    const double bracket = (u1 / omega) * xp - 2.0 * pp + 2.0 * wbar * xp;
    if (bracket > 0.0) out.i2 = std::pow(v, omega / u1) * std::pow(bracket, 1.0 / wbar);
    return out;
}

/// First integrals of the F = (u1 t + u0)^(-4) family in the original
/// variables: I1 = (x omega / V)^2 + (V p - u1 x)^2 and
/// I2 = arcsin(x omega / (V sqrt(I1))) + omega/(u1 V). The arcsin argument
/// sits exactly at +/-1 at turning points, so values within 1e-12 of the
/// boundary are clamped.
inline PairInvariants invariants_quartic(const PhaseState& xi, double t, double u0, double u1,
                                         double omega) {
    if (!(omega > 0.0))
        throw std::invalid_argument("invariants_quartic: omega must be positive");
    const double v = u1 * t + u0;
    if (!(v > 0.0))
        throw std::domain_error("invariants_quartic: V(t) = u1 t + u0 must be positive");
    PairInvariants out;
    const double a = xi.x * omega / v;
    const double b = v * xi.p - u1 * xi.x;
    out.i1 = a * a + b * b;
    if (u1 == 0.0 || out.i1 <= 0.0) return out;
    double s = a / std::sqrt(out.i1);
    if (std::abs(s) > 1.0) {
        if (std::abs(s) <= 1.0 + 1e-12)
            s = s > 0.0 ? 1.0 : -1.0;
        else
            throw std::domain_error("invariants_quartic: arcsin argument outside [-1, 1]");
    }
    out.i2 = std::asin(s) + omega / (u1 * v);
    return out;
}

/// The phase invariant of the quartic family along a trajectory with the
/// arcsin branches resolved: the angle is recovered by atan2 from both
/// reduced components and unwrapped by continuity, so the returned sequence
/// is constant up to integration error.
inline std::vector<double> quartic_i2_unwrapped(const Trajectory& traj, double u0, double u1,
                                                double omega) {
    if (u1 == 0.0) throw std::invalid_argument("quartic_i2_unwrapped: u1 must be nonzero");
    std::vector<double> out;
    out.reserve(traj.grid.size());
    double prev = 0.0;
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::size_t i = 0; i < traj.grid.size(); ++i) {
        const double t = traj.grid[i];
        const double v = u1 * t + u0;
        if (!(v > 0.0))
            throw std::domain_error("quartic_i2_unwrapped: V must stay positive");
        const double sin_part = traj.states[i].x * omega / v;
        const double cos_part = v * traj.states[i].p - u1 * traj.states[i].x;
        double theta = std::atan2(sin_part, cos_part);
        if (i > 0) theta += two_pi * std::round((prev - theta) / two_pi);
        prev = theta;
        out.push_back(theta + omega / (u1 * v));
    }
    return out;
}

/// Maximum relative deviation of an invariant from its initial value along
/// a trajectory.
inline double conservation_drift(const std::function<double(double, PhaseState)>& invariant,
                                 const Trajectory& traj) {
    if (!invariant) throw std::invalid_argument("conservation_drift: missing invariant");
    if (traj.grid.empty()) throw std::invalid_argument("conservation_drift: empty trajectory");
    double reference = 0.0;
    double drift = 0.0;
    for (std::size_t i = 0; i < traj.grid.size(); ++i) {
        double value;
        try {
            value = invariant(traj.grid[i], traj.states[i]);
        } catch (const std::exception& e) {
            throw std::runtime_error("conservation_drift: invariant evaluation failed at t = " +
                                     std::to_string(traj.grid[i]) + ": " + e.what());
        }
        if (i == 0)
            reference = value;
        else
            drift = std::max(drift, std::abs(value - reference));
    }
    return drift / std::max(std::abs(reference), 1e-30);
}

}  // namespace lieosc
