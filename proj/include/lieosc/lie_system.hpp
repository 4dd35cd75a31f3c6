#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lieosc/ode.hpp"
#include "lieosc/sl2.hpp"
#include "lieosc/time_function.hpp"

namespace lieosc {

/// The coefficient triple (b0, b1, b2) of a Lie system on SL(2,R),
/// dxi/dt = (b0 X0 + b1 X1 + b2 X2) xi. Oscillator specs give b1 = 0 but
/// gauge transformations produce nonzero b1, so all three are carried.
struct CoefficientCurve {
    TimeFunction b0;
    TimeFunction b1;
    TimeFunction b2;
    double t0 = 0.0;
    double t1 = 1.0;
};

/// Oscillator data: H = p^2 / (2 m(t)) + F(t) omega^2 x^2 / 2.
struct TdfhoSpec {
    TimeFunction mass;
    TimeFunction frequency_factor;
    double omega = 1.0;
    double t0 = 0.0;
    double t1 = 1.0;
};

struct Trajectory {
    std::vector<double> grid;
    std::vector<PhaseState> states;
};

/// A solution of the group equation sampled on a grid, A(grid[0]) = I.
struct GroupPath {
    std::vector<double> grid;
    std::vector<GroupElement> elements;
};

/// Coefficients of the oscillator Hamiltonian as a Lie system:
/// b0 = 1/m(t), b1 = 0, b2 = F(t) omega^2.
inline CoefficientCurve coeffs_from_spec(const TdfhoSpec& spec) {
    if (!spec.mass.valid() || !spec.frequency_factor.valid())
        throw std::invalid_argument("coeffs_from_spec: missing mass or frequency factor");
    if (!(spec.t1 > spec.t0))
        throw std::invalid_argument("coeffs_from_spec: span must have t1 > t0");
    constexpr int check_points = 201;
    for (int i = 0; i < check_points; ++i) {
        const double t =
            spec.t0 + (spec.t1 - spec.t0) * static_cast<double>(i) / (check_points - 1);
        const double m = spec.mass(t);
        if (!(m > 0.0) || !std::isfinite(m))
            throw std::invalid_argument("coeffs_from_spec: mass must stay positive on span");
    }
    const TimeFunction mass = spec.mass;
    const TimeFunction ff = spec.frequency_factor;
    const double w2 = spec.omega * spec.omega;
    CoefficientCurve b;
    b.b0 = TimeFunction::analytic(
        [mass](double t) { return 1.0 / mass(t); },
        [mass](double t) {
            const double m = mass(t);
            return -mass.derivative(t) / (m * m);
        });
    b.b1 = TimeFunction::constant(0.0);
    b.b2 = TimeFunction::analytic([ff, w2](double t) { return ff(t) * w2; },
                                  [ff, w2](double t) { return ff.derivative(t) * w2; });
    b.t0 = spec.t0;
    b.t1 = spec.t1;
    return b;
}

/// M(t) = -(b0 M0 + b1 M1 + b2 M2) = [[b1/2, b0], [-b2, -b1/2]], the
/// right-hand side of the group equation dA/dt = M(t) A.
inline TracelessMatrix system_matrix(const CoefficientCurve& b, double t) {
    return {0.5 * b.b1(t), b.b0(t), -b.b2(t)};
}

/// Integrates dA/dt = M(t) A with A(grid[0]) = I. After each output point
/// the matrix is rescaled by det^(-1/2) and integration continues from the
/// rescaled value, keeping the path unimodular to well below 1e-9.
inline GroupPath integrate_group(const CoefficientCurve& b, const std::vector<double>& grid,
                                 double rel_tol = 1e-9, double abs_tol = 1e-12) {
    if (grid.size() < 1) throw std::invalid_argument("integrate_group: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("integrate_group: grid must be strictly increasing");

    GroupPath path;
    path.grid = grid;
    path.elements.reserve(grid.size());
    GroupElement a = GroupElement::identity();
    path.elements.push_back(a);

    auto rhs = [&b](double t, const std::vector<double>& y, std::vector<double>& dy) {
        const TracelessMatrix m = system_matrix(b, t);
        dy[0] = m.m11 * y[0] + m.m12 * y[2];
        dy[1] = m.m11 * y[1] + m.m12 * y[3];
        dy[2] = m.m21 * y[0] + m.m22() * y[2];
        dy[3] = m.m21 * y[1] + m.m22() * y[3];
    };

    for (std::size_t i = 1; i < grid.size(); ++i) {
        IvpProblem problem;
        problem.dimension = 4;
        problem.rhs = rhs;
        problem.t0 = grid[i - 1];
        problem.t1 = grid[i];
        problem.y0 = {a.a11, a.a12, a.a21, a.a22};
        problem.rel_tol = rel_tol;
        problem.abs_tol = abs_tol;
        const SampledCurve seg = integrate(problem, {grid[i]});
        const std::vector<double>& y = seg.values.back();
        a = {y[0], y[1], y[2], y[3]};
        const double det = a.det();
        if (!(det > 0.0))
            throw IntegrationFailure("integrate_group: determinant collapsed", grid[i - 1]);
        const double s = 1.0 / std::sqrt(det);
        a = {s * a.a11, s * a.a12, s * a.a21, s * a.a22};
        path.elements.push_back(a);
    }
    return path;
}

/// Transports an initial state along a group path: xi(t) = A(t) xi0.
inline Trajectory flow_state(const GroupPath& path, const PhaseState& xi0) {
    Trajectory traj;
    traj.grid = path.grid;
    traj.states.reserve(path.elements.size());
    for (const GroupElement& a : path.elements) traj.states.push_back(apply(a, xi0));
    return traj;
}

/// A point of the projective line R u {inf}.
struct ExtendedReal {
    double value = 0.0;
    bool infinite = false;

    static ExtendedReal finite(double v) { return {v, false}; }
    static ExtendedReal infinity() { return {0.0, true}; }
};

/// Moebius action of a group path on an initial Riccati value:
/// w(t) = (a11 w0 + a12) / (a21 w0 + a22), with projective handling of
/// poles. The projected curve satisfies dw/dt = b0 + b1 w + b2 w^2.
inline std::vector<ExtendedReal> riccati_project(const GroupPath& path,
                                                 const ExtendedReal& w0) {
    // homogeneous representative (u, v) with w = u / v
    const double u0 = w0.infinite ? 1.0 : w0.value;
    const double v0 = w0.infinite ? 0.0 : 1.0;
    std::vector<ExtendedReal> out;
    out.reserve(path.elements.size());
    for (const GroupElement& a : path.elements) {
        const double num = a.a11 * u0 + a.a12 * v0;
        const double den = a.a21 * u0 + a.a22 * v0;
        if (den == 0.0)
            out.push_back(ExtendedReal::infinity());
        else
            out.push_back(ExtendedReal::finite(num / den));
    }
    return out;
}

}  // namespace lieosc
