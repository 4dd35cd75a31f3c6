#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "lieosc/lie_system.hpp"
#include "lieosc/ode.hpp"
#include "lieosc/sl2.hpp"
#include "lieosc/time_function.hpp"

namespace lieosc {

/// A curve of 2x2 matrices with entrywise derivative access. Curves used as
/// gauge transformations must have det = 1 along the span.
class TransformCurve {
  public:
    TransformCurve(TimeFunction alpha, TimeFunction beta, TimeFunction gamma,
                   TimeFunction delta, double t0, double t1)
        : alpha_(std::move(alpha)),
          beta_(std::move(beta)),
          gamma_(std::move(gamma)),
          delta_(std::move(delta)),
          t0_(t0),
          t1_(t1) {
        if (!(t1_ > t0_))
            throw std::invalid_argument("TransformCurve: span must have t1 > t0");
        if (!alpha_.valid() || !beta_.valid() || !gamma_.valid() || !delta_.valid())
            throw std::invalid_argument("TransformCurve: missing entry function");
    }

    static TransformCurve identity(double t0, double t1) {
        return TransformCurve(TimeFunction::constant(1.0), TimeFunction::constant(0.0),
                              TimeFunction::constant(0.0), TimeFunction::constant(1.0), t0, t1);
    }

    /// Constant curve equal to a fixed matrix.
    static TransformCurve constant(const GroupElement& g, double t0, double t1) {
        return TransformCurve(TimeFunction::constant(g.a11), TimeFunction::constant(g.a12),
                              TimeFunction::constant(g.a21), TimeFunction::constant(g.a22), t0,
                              t1);
    }

    GroupElement value(double t) const { return {alpha_(t), beta_(t), gamma_(t), delta_(t)}; }

    /// Entrywise time derivative (a plain matrix, not a group element).
    Mat2 derivative(double t) const {
        return {alpha_.derivative(t), beta_.derivative(t), gamma_.derivative(t),
                delta_.derivative(t)};
    }

    double det(double t) const { return value(t).det(); }

    double t0() const { return t0_; }
    double t1() const { return t1_; }

    const TimeFunction& alpha() const { return alpha_; }
    const TimeFunction& beta() const { return beta_; }
    const TimeFunction& gamma() const { return gamma_; }
    const TimeFunction& delta() const { return delta_; }

    bool unimodular_on_span(double tol = 1e-8, int samples = 33) const {
        for (int i = 0; i < samples; ++i) {
            const double t = t0_ + (t1_ - t0_) * static_cast<double>(i) / (samples - 1);
            if (std::abs(det(t) - 1.0) > tol) return false;
        }
        return true;
    }

  private:
    TimeFunction alpha_, beta_, gamma_, delta_;
    double t0_, t1_;
};

/// Gauge action of a curve Abar on the coefficient triple. The b1' line of
/// the transformation reads the bare delta of the source as delta-bar,
/// which is what makes the identity curve fix every system.
inline CoefficientCurve gauge_transform_coeffs(const CoefficientCurve& b,
                                               const TransformCurve& abar) {
    if (!abar.unimodular_on_span())
        throw std::invalid_argument(
            "gauge_transform_coeffs: transform curve must have det = 1 on span");
    const TimeFunction al = abar.alpha();
    const TimeFunction be = abar.beta();
    const TimeFunction ga = abar.gamma();
    const TimeFunction de = abar.delta();
    const TimeFunction b0 = b.b0, b1 = b.b1, b2 = b.b2;

    auto b2p = [=](double t) {
        const double d = de(t), g = ga(t);
        return d * d * b2(t) - d * g * b1(t) + g * g * b0(t) + g * de.derivative(t) -
               d * ga.derivative(t);
    };
    auto b1p = [=](double t) {
        const double a = al(t), bb = be(t), g = ga(t), d = de(t);
        return -2.0 * bb * d * b2(t) + (a * d + bb * g) * b1(t) - 2.0 * a * g * b0(t) +
               d * al.derivative(t) - a * de.derivative(t) + bb * ga.derivative(t) -
               g * be.derivative(t);
    };
    auto b0p = [=](double t) {
        const double a = al(t), bb = be(t);
        return bb * bb * b2(t) - a * bb * b1(t) + a * a * b0(t) + a * be.derivative(t) -
               bb * al.derivative(t);
    };

    CoefficientCurve out;
    out.b0 = TimeFunction::numeric(b0p);
    out.b1 = TimeFunction::numeric(b1p);
    out.b2 = TimeFunction::numeric(b2p);
    out.t0 = std::max(b.t0, abar.t0());
    out.t1 = std::min(b.t1, abar.t1());
    if (!(out.t1 > out.t0))
        throw std::invalid_argument("gauge_transform_coeffs: spans do not overlap");
    return out;
}

/// Pointwise action on trajectories: xi'(t) = Abar(t) xi(t).
inline Trajectory transform_trajectory(const TransformCurve& abar, const Trajectory& traj) {
    Trajectory out;
    out.grid = traj.grid;
    out.states.reserve(traj.states.size());
    for (std::size_t i = 0; i < traj.grid.size(); ++i)
        out.states.push_back(apply(abar.value(traj.grid[i]), traj.states[i]));
    return out;
}

/// Pointwise product of curves with the product-rule derivative. Gauging by
/// a1 and then a2 equals gauging by compose_action(a2, a1).
inline TransformCurve compose_action(const TransformCurve& a2, const TransformCurve& a1) {
    const double t0 = std::max(a1.t0(), a2.t0());
    const double t1 = std::min(a1.t1(), a2.t1());
    auto entry = [a2, a1](int row, int col) {
        auto value = [a2, a1, row, col](double t) {
            const GroupElement x = a2.value(t), y = a1.value(t);
            const GroupElement pr = x * y;
            const double m[4] = {pr.a11, pr.a12, pr.a21, pr.a22};
            return m[row * 2 + col];
        };
        auto deriv = [a2, a1, row, col](double t) {
            const GroupElement x = a2.value(t), y = a1.value(t);
            const Mat2 dx = a2.derivative(t), dy = a1.derivative(t);
            const GroupElement pr1 = dx * y;
            const GroupElement pr2 = x * dy;
            const double m[4] = {pr1.a11 + pr2.a11, pr1.a12 + pr2.a12, pr1.a21 + pr2.a21,
                                 pr1.a22 + pr2.a22};
            return m[row * 2 + col];
        };
        return TimeFunction::analytic(value, deriv);
    };
    return TransformCurve(entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1), t0, t1);
}

/// Inverse of a unimodular curve, with derivative d(A^-1) = -A^-1 dA A^-1.
inline TransformCurve inverse(const TransformCurve& a) {
    if (!a.unimodular_on_span())
        throw std::invalid_argument("inverse: transform curve must have det = 1 on span");
    auto entry = [a](int row, int col) {
        auto value = [a, row, col](double t) {
            const GroupElement inv = inverse_unimodular(a.value(t));
            const double m[4] = {inv.a11, inv.a12, inv.a21, inv.a22};
            return m[row * 2 + col];
        };
        auto deriv = [a, row, col](double t) {
            const GroupElement inv = inverse_unimodular(a.value(t));
            const Mat2 da = a.derivative(t);
            const GroupElement d = inv * da * inv;
            const double m[4] = {-d.a11, -d.a12, -d.a21, -d.a22};
            return m[row * 2 + col];
        };
        return TimeFunction::analytic(value, deriv);
    };
    return TransformCurve(entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1), a.t0(), a.t1());
}

/// The 4x4 matrix of the linearised connecting equation acting on the
/// stacked entries (alpha, beta, gamma, delta) of Abar. Always traceless,
/// which is why det(Abar) is a first integral.
inline std::array<std::array<double, 4>, 4> riccati_rhs_matrix(const CoefficientCurve& b,
                                                               const CoefficientCurve& bprime,
                                                               double t) {
    const double b0 = b.b0(t), b1 = b.b1(t), b2 = b.b2(t);
    const double b0p = bprime.b0(t), b1p = bprime.b1(t), b2p = bprime.b2(t);
    const double half_diff = 0.5 * (b1p - b1);
    const double half_sum = 0.5 * (b1p + b1);
    return {{{half_diff, b2, b0p, 0.0},
             {-b0, half_sum, 0.0, b0p},
             {-b2p, 0.0, -half_sum, b2},
             {0.0, -b2p, -b0, -half_diff}}};
}

/// Raw integration of the connecting equation dAbar/dt = M' Abar - Abar M
/// from an arbitrary (not necessarily unimodular) initial matrix. Values
/// are the stacked entries (alpha, beta, gamma, delta) on the grid.
inline SampledCurve connecting_path(const CoefficientCurve& b, const CoefficientCurve& bprime,
                                    const GroupElement& abar0, const std::vector<double>& grid,
                                    double rel_tol = 1e-9, double abs_tol = 1e-12) {
    if (grid.size() < 2)
        throw std::invalid_argument("connecting_path: grid needs at least 2 points");
    IvpProblem problem;
    problem.dimension = 4;
    problem.rhs = [&b, &bprime](double t, const std::vector<double>& y,
                                std::vector<double>& dy) {
        const auto m = riccati_rhs_matrix(b, bprime, t);
        for (int r = 0; r < 4; ++r) {
            double s = 0.0;
            for (int c = 0; c < 4; ++c) s += m[r][c] * y[c];
            dy[r] = s;
        }
    };
    problem.t0 = grid.front();
    problem.t1 = grid.back();
    problem.y0 = {abar0.a11, abar0.a12, abar0.a21, abar0.a22};
    problem.rel_tol = rel_tol;
    problem.abs_tol = abs_tol;
    return integrate(problem, grid);
}

namespace detail {

/// Cubic Hermite data for a connecting curve: node values from the
/// integration, node slopes and off-node derivatives from the connecting
/// equation itself, so the derivative is exact in the model.
struct ConnectingCurveData {
    SampledCurve samples;
    CoefficientCurve b;
    CoefficientCurve bprime;
    std::vector<std::array<double, 4>> node_slopes;

    std::array<double, 4> rhs_at(double t, const std::array<double, 4>& y) const {
        const auto m = riccati_rhs_matrix(b, bprime, t);
        std::array<double, 4> dy{};
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) dy[r] += m[r][c] * y[c];
        return dy;
    }

    std::array<double, 4> value_at(double t) const {
        const std::vector<double>& g = samples.grid;
        const double span = g.back() - g.front();
        const double slack = 1e-12 * std::max(span, 1.0);
        if (t < g.front() - slack || t > g.back() + slack)
            throw std::out_of_range("connecting curve evaluated outside its span");
        auto pick = [this](std::size_t i) {
            return std::array<double, 4>{samples.values[i][0], samples.values[i][1],
                                         samples.values[i][2], samples.values[i][3]};
        };
        if (t <= g.front()) return pick(0);
        if (t >= g.back()) return pick(g.size() - 1);
        const auto it = std::upper_bound(g.begin(), g.end(), t);
        const std::size_t hi = static_cast<std::size_t>(it - g.begin());
        const double h = g[hi] - g[hi - 1];
        const double s = (t - g[hi - 1]) / h;
        const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        const double h10 = s * (1.0 - s) * (1.0 - s);
        const double h01 = s * s * (3.0 - 2.0 * s);
        const double h11 = s * s * (s - 1.0);
        const auto y0 = pick(hi - 1);
        const auto y1 = pick(hi);
        std::array<double, 4> out{};
        for (int c = 0; c < 4; ++c)
            out[c] = h00 * y0[c] + h * h10 * node_slopes[hi - 1][c] + h01 * y1[c] +
                     h * h11 * node_slopes[hi][c];
        return out;
    }
};

}  // namespace detail

/// Solves the connecting equation for the curve relating system b to system
/// b': gauge_transform_coeffs(b, result) reproduces b'. The initial matrix
/// must be unimodular; det(Abar(t)) = 1 is then preserved as a first
/// integral of the equation rather than enforced by projection.
inline TransformCurve solve_connecting_curve(const CoefficientCurve& b,
                                             const CoefficientCurve& bprime,
                                             const GroupElement& abar0,
                                             const std::vector<double>& grid,
                                             double rel_tol = 1e-9, double abs_tol = 1e-12) {
    if (std::abs(abar0.det() - 1.0) > 1e-9)
        throw std::invalid_argument("solve_connecting_curve: initial matrix must have det = 1");
    auto data = std::make_shared<detail::ConnectingCurveData>();
    data->samples = connecting_path(b, bprime, abar0, grid, rel_tol, abs_tol);
    data->b = b;
    data->bprime = bprime;
    data->node_slopes.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::array<double, 4> y{data->samples.values[i][0], data->samples.values[i][1],
                                      data->samples.values[i][2], data->samples.values[i][3]};
        data->node_slopes.push_back(data->rhs_at(grid[i], y));
    }
    auto entry = [data](int idx) {
        auto value = [data, idx](double t) { return data->value_at(t)[idx]; };
        auto deriv = [data, idx](double t) { return data->rhs_at(t, data->value_at(t))[idx]; };
        return TimeFunction::analytic(value, deriv);
    };
    return TransformCurve(entry(0), entry(1), entry(2), entry(3), grid.front(), grid.back());
}

}  // namespace lieosc
