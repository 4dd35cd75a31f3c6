#pragma once

// Shared fixtures for the test suites: deterministic random curve
// generators, a series-based matrix exponential oracle, and small grid /
// comparison utilities. Everything here is independent of the closed-form
// code paths it is used to check.

#include <cmath>
#include <random>
#include <vector>

#include "lieosc/lieosc.hpp"

namespace testutil {

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / (n - 1);
    g.back() = b;
    return g;
}

/// Smooth random function a0 + sum_k a_k sin(w_k t + phi_k) with analytic
/// derivative; |value| stays within roughly `amp`.
inline lieosc::TimeFunction random_smooth(std::mt19937& rng, double amp,
                                          bool vanish_at_zero = false) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> freq(0.4, 1.6);
    const int terms = 3;
    std::vector<double> a(terms), w(terms), phi(terms);
    double a0 = vanish_at_zero ? 0.0 : 0.4 * amp * unit(rng);
    for (int k = 0; k < terms; ++k) {
        a[k] = 0.2 * amp * unit(rng);
        w[k] = freq(rng);
        phi[k] = vanish_at_zero ? 0.0 : 3.14159 * unit(rng);
    }
    auto value = [=](double t) {
        double s = a0;
        for (int k = 0; k < terms; ++k) s += a[k] * std::sin(w[k] * t + phi[k]);
        return s;
    };
    auto deriv = [=](double t) {
        double s = 0.0;
        for (int k = 0; k < terms; ++k) s += a[k] * w[k] * std::cos(w[k] * t + phi[k]);
        return s;
    };
    return lieosc::TimeFunction::analytic(value, deriv);
}

/// Smooth random positive function exp(q(t)) with q bounded by `log_amp`.
inline lieosc::TimeFunction random_positive(std::mt19937& rng, double log_amp) {
    lieosc::TimeFunction q = random_smooth(rng, log_amp);
    auto value = [q](double t) { return std::exp(q(t)); };
    auto deriv = [q](double t) { return std::exp(q(t)) * q.derivative(t); };
    return lieosc::TimeFunction::analytic(value, deriv);
}

/// Random smooth coefficient triple with bounded entries.
inline lieosc::CoefficientCurve random_coeffs(std::mt19937& rng, double t0, double t1,
                                              double amp) {
    lieosc::CoefficientCurve b;
    b.b0 = random_smooth(rng, amp);
    b.b1 = random_smooth(rng, amp);
    b.b2 = random_smooth(rng, amp);
    b.t0 = t0;
    b.t1 = t1;
    return b;
}

/// Random smooth unimodular curve Abar(t) = exp(K(t)) with K traceless;
/// det = 1 holds identically. Entry derivatives use the symmetric
/// difference fallback.
inline lieosc::TransformCurve random_unimodular(std::mt19937& rng, double t0, double t1,
                                                double amp, bool identity_at_zero = false) {
    lieosc::TimeFunction k11 = random_smooth(rng, amp, identity_at_zero);
    lieosc::TimeFunction k12 = random_smooth(rng, amp, identity_at_zero);
    lieosc::TimeFunction k21 = random_smooth(rng, amp, identity_at_zero);
    auto entry = [k11, k12, k21](int idx) {
        return lieosc::TimeFunction::numeric([k11, k12, k21, idx](double t) {
            const lieosc::GroupElement e =
                lieosc::exp_traceless({k11(t), k12(t), k21(t)});
            const double m[4] = {e.a11, e.a12, e.a21, e.a22};
            return m[idx];
        });
    };
    return lieosc::TransformCurve(entry(0), entry(1), entry(2), entry(3), t0, t1);
}

/// Matrix exponential by scaling-and-squaring of the plain Taylor series;
/// independent oracle for exp_traceless.
inline lieosc::GroupElement expm_series(const lieosc::TracelessMatrix& x) {
    using lieosc::GroupElement;
    double a[4] = {x.m11, x.m12, x.m21, x.m22()};
    const double norm = std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2]),
                                  std::abs(a[3])});
    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    for (double& v : a) v *= scale;

    double result[4] = {1.0, 0.0, 0.0, 1.0};
    double term[4] = {1.0, 0.0, 0.0, 1.0};
    for (int k = 1; k <= 24; ++k) {
        const double t0 = term[0] * a[0] + term[1] * a[2];
        const double t1 = term[0] * a[1] + term[1] * a[3];
        const double t2 = term[2] * a[0] + term[3] * a[2];
        const double t3 = term[2] * a[1] + term[3] * a[3];
        term[0] = t0 / k;
        term[1] = t1 / k;
        term[2] = t2 / k;
        term[3] = t3 / k;
        for (int i = 0; i < 4; ++i) result[i] += term[i];
    }
    for (int s = 0; s < squarings; ++s) {
        const double r0 = result[0] * result[0] + result[1] * result[2];
        const double r1 = result[0] * result[1] + result[1] * result[3];
        const double r2 = result[2] * result[0] + result[3] * result[2];
        const double r3 = result[2] * result[1] + result[3] * result[3];
        result[0] = r0;
        result[1] = r1;
        result[2] = r2;
        result[3] = r3;
    }
    return GroupElement{result[0], result[1], result[2], result[3]};
}

inline double max_entry_diff(const lieosc::GroupElement& x, const lieosc::GroupElement& y) {
    return std::max({std::abs(x.a11 - y.a11), std::abs(x.a12 - y.a12),
                     std::abs(x.a21 - y.a21), std::abs(x.a22 - y.a22)});
}

/// Solve the 2-dim oscillator system xdot = b0 p + b1/2 x,
/// pdot = -b2 x - b1/2 p directly; the independent route against which the
/// group-equation pipeline is checked.
inline lieosc::Trajectory rk_oracle(const lieosc::CoefficientCurve& b,
                                    const lieosc::PhaseState& xi0,
                                    const std::vector<double>& grid, double rel_tol = 1e-11,
                                    double abs_tol = 1e-13) {
    lieosc::IvpProblem problem;
    problem.dimension = 2;
    problem.rhs = [&b](double t, const std::vector<double>& y, std::vector<double>& dy) {
        const double half_b1 = 0.5 * b.b1(t);
        dy[0] = half_b1 * y[0] + b.b0(t) * y[1];
        dy[1] = -b.b2(t) * y[0] - half_b1 * y[1];
    };
    problem.t0 = grid.front();
    problem.t1 = grid.back();
    problem.y0 = {xi0.x, xi0.p};
    problem.rel_tol = rel_tol;
    problem.abs_tol = abs_tol;
    const auto sol = lieosc::integrate(problem, grid);
    lieosc::Trajectory traj;
    traj.grid = grid;
    for (const auto& y : sol.values) traj.states.push_back({y[0], y[1]});
    return traj;
}

inline double sup_x(const lieosc::Trajectory& traj) {
    double s = 0.0;
    for (const auto& st : traj.states) s = std::max(s, std::abs(st.x));
    return s;
}

inline double sup_state(const lieosc::Trajectory& traj) {
    double s = 0.0;
    for (const auto& st : traj.states)
        s = std::max({s, std::abs(st.x), std::abs(st.p)});
    return s;
}

inline double max_state_diff(const lieosc::Trajectory& a, const lieosc::Trajectory& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.states.size(); ++i)
        s = std::max({s, std::abs(a.states[i].x - b.states[i].x),
                      std::abs(a.states[i].p - b.states[i].p)});
    return s;
}

}  // namespace testutil
