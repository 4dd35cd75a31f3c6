#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace lieosc {

/// Thrown when the integrator cannot continue; carries the last time at
/// which the solution was still valid.
struct IntegrationFailure : std::runtime_error {
    double last_good_time;
    IntegrationFailure(const std::string& msg, double t)
        : std::runtime_error(msg + " (last good t = " + std::to_string(t) + ")"),
          last_good_time(t) {}
};

/// Initial value problem dy/dt = rhs(t, y), y(t0) = y0, solved on [t0, t1].
struct IvpProblem {
    std::size_t dimension = 0;
    std::function<void(double, const std::vector<double>&, std::vector<double>&)> rhs;
    double t0 = 0.0;
    double t1 = 1.0;
    std::vector<double> y0;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
};

/// A vector-valued function sampled on a strictly increasing time grid.
struct SampledCurve {
    std::vector<double> grid;
    std::vector<std::vector<double>> values;

    void validate() const {
        if (grid.size() != values.size())
            throw std::invalid_argument("SampledCurve: grid/value length mismatch");
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1]))
                throw std::invalid_argument("SampledCurve: grid must be strictly increasing");
    }
};

namespace detail {

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

/// Dormand-Prince 5(4) tableau.
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // embedded error weights (5th order minus 4th order)
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // dense-output weights
    static constexpr double d1 = -12715105075.0 / 11282082432.0;
    static constexpr double d3 = 87487479700.0 / 32700410799.0;
    static constexpr double d4 = -10690763975.0 / 1880347072.0;
    static constexpr double d5 = 701980252875.0 / 199316789632.0;
    static constexpr double d6 = -1453857185.0 / 822651844.0;
    static constexpr double d7 = 69997945.0 / 29380423.0;
};

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration with dense output on the
/// requested grid. Pure and deterministic: identical inputs give
/// bit-identical outputs.
inline SampledCurve integrate(const IvpProblem& problem,
                              const std::vector<double>& output_grid) {
    using detail::Dopri5;
    const std::size_t n = problem.dimension;
    if (n == 0 || problem.y0.size() != n)
        throw std::invalid_argument("integrate: dimension/initial state mismatch");
    if (!problem.rhs) throw std::invalid_argument("integrate: missing right-hand side");
    if (!(problem.t1 > problem.t0))
        throw std::invalid_argument("integrate: time span must have t1 > t0");
    if (!(problem.rel_tol > 0.0) || !(problem.abs_tol > 0.0))
        throw std::invalid_argument("integrate: tolerances must be positive");
    if (output_grid.empty()) throw std::invalid_argument("integrate: empty output grid");
    const double span = problem.t1 - problem.t0;
    const double slack = 1e-12 * std::max(span, 1.0);
    for (std::size_t i = 0; i < output_grid.size(); ++i) {
        if (output_grid[i] < problem.t0 - slack || output_grid[i] > problem.t1 + slack)
            throw std::invalid_argument("integrate: output grid outside [t0, t1]");
        if (i > 0 && !(output_grid[i] > output_grid[i - 1]))
            throw std::invalid_argument("integrate: output grid must be strictly increasing");
    }

    SampledCurve out;
    out.grid = output_grid;
    out.values.assign(output_grid.size(), std::vector<double>());

    std::vector<double> y = problem.y0;
    std::vector<double> ynew(n), ytmp(n), yerr(n);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    std::vector<double> rc1(n), rc2(n), rc3(n), rc4(n), rc5(n);

    double t = problem.t0;
    std::size_t next_out = 0;

    auto eval = [&](double tt, const std::vector<double>& yy, std::vector<double>& ff) {
        problem.rhs(tt, yy, ff);
        if (!detail::all_finite(ff))
            throw IntegrationFailure("integrate: non-finite right-hand side value", t);
    };

    // emit any output points sitting at t0
    while (next_out < output_grid.size() && output_grid[next_out] <= t + slack) {
        out.values[next_out] = y;
        ++next_out;
    }

    eval(t, y, k1);

    // initial step size following Hairer-Norsett-Wanner
    double h;
    {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sk = problem.abs_tol + problem.rel_tol * std::abs(y[i]);
            d0 += (y[i] / sk) * (y[i] / sk);
            d1 += (k1[i] / sk) * (k1[i] / sk);
        }
        d0 = std::sqrt(d0 / static_cast<double>(n));
        d1 = std::sqrt(d1 / static_cast<double>(n));
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, span);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h0 * k1[i];
        eval(t + h0, ytmp, k2);
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sk = problem.abs_tol + problem.rel_tol * std::abs(y[i]);
            d2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
        }
        d2 = std::sqrt(d2 / static_cast<double>(n)) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        h = std::min({100.0 * h0, h1, span});
    }

    std::size_t step_count = 0;
    constexpr std::size_t max_steps = 10'000'000;

    while (t < problem.t1 - slack) {
        if (++step_count > max_steps)
            throw IntegrationFailure("integrate: maximum step count exceeded", t);
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0))
            throw IntegrationFailure("integrate: step size underflow", t);
        if (t + 1.01 * h >= problem.t1) h = problem.t1 - t;

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * Dopri5::a21 * k1[i];
        eval(t + Dopri5::c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (Dopri5::a31 * k1[i] + Dopri5::a32 * k2[i]);
        eval(t + Dopri5::c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (Dopri5::a41 * k1[i] + Dopri5::a42 * k2[i] + Dopri5::a43 * k3[i]);
        eval(t + Dopri5::c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (Dopri5::a51 * k1[i] + Dopri5::a52 * k2[i] +
                                  Dopri5::a53 * k3[i] + Dopri5::a54 * k4[i]);
        eval(t + Dopri5::c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (Dopri5::a61 * k1[i] + Dopri5::a62 * k2[i] +
                                  Dopri5::a63 * k3[i] + Dopri5::a64 * k4[i] +
                                  Dopri5::a65 * k5[i]);
        eval(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (Dopri5::b1 * k1[i] + Dopri5::b3 * k3[i] +
                                  Dopri5::b4 * k4[i] + Dopri5::b5 * k5[i] +
                                  Dopri5::b6 * k6[i]);
        eval(t + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = h * (Dopri5::e1 * k1[i] + Dopri5::e3 * k3[i] +
                                   Dopri5::e4 * k4[i] + Dopri5::e5 * k5[i] +
                                   Dopri5::e6 * k6[i] + Dopri5::e7 * k7[i]);
            const double sk = problem.abs_tol +
                              problem.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sk) * (ei / sk);
        }
        err = std::sqrt(err / static_cast<double>(n));

        if (err <= 1.0) {
            // dense-output coefficients for this accepted step
            const bool need_dense =
                next_out < output_grid.size() && output_grid[next_out] <= t + h + slack;
            if (need_dense) {
                for (std::size_t i = 0; i < n; ++i) {
                    const double ydiff = ynew[i] - y[i];
                    const double bspl = h * k1[i] - ydiff;
                    rc1[i] = y[i];
                    rc2[i] = ydiff;
                    rc3[i] = bspl;
                    rc4[i] = ydiff - h * k7[i] - bspl;
                    rc5[i] = h * (Dopri5::d1 * k1[i] + Dopri5::d3 * k3[i] +
                                  Dopri5::d4 * k4[i] + Dopri5::d5 * k5[i] +
                                  Dopri5::d6 * k6[i] + Dopri5::d7 * k7[i]);
                }
                while (next_out < output_grid.size() &&
                       output_grid[next_out] <= t + h + slack) {
                    const double theta = std::clamp((output_grid[next_out] - t) / h, 0.0, 1.0);
                    std::vector<double> u(n);
                    for (std::size_t i = 0; i < n; ++i)
                        u[i] = rc1[i] + theta * (rc2[i] + (1.0 - theta) *
                                   (rc3[i] + theta * (rc4[i] + (1.0 - theta) * rc5[i])));
                    out.values[next_out] = std::move(u);
                    ++next_out;
                }
            }
            t += h;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 10.0);
            h *= fac;
        } else {
            const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
            h *= fac;
        }
    }

    while (next_out < output_grid.size()) {  // points coinciding with t1 up to roundoff
        out.values[next_out] = y;
        ++next_out;
    }
    return out;
}

/// Adaptive Simpson quadrature of f over [a, b] with absolute error <= tol.
inline double quadrature(const std::function<double(double)>& f, double a, double b,
                         double tol) {
    if (!f) throw std::invalid_argument("quadrature: missing integrand");
    if (!(tol > 0.0)) throw std::invalid_argument("quadrature: tolerance must be positive");
    if (a == b) return 0.0;
    const double sign = b >= a ? 1.0 : -1.0;
    if (sign < 0.0) std::swap(a, b);

    auto value = [&](double t) {
        const double v = f(t);
        if (!std::isfinite(v))
            throw std::domain_error("quadrature: non-finite integrand value at t = " +
                                    std::to_string(t));
        return v;
    };

    struct Worker {
        const std::function<double(double)>& value;
        explicit Worker(const std::function<double(double)>& v) : value(v) {}
        double run(double x0, double x2, double f0, double f1, double f2, double whole,
                   double tol, int depth) const {
            const double x1 = 0.5 * (x0 + x2);
            const double fl = value(0.5 * (x0 + x1));
            const double fr = value(0.5 * (x1 + x2));
            const double left = (x1 - x0) / 6.0 * (f0 + 4.0 * fl + f1);
            const double right = (x2 - x1) / 6.0 * (f1 + 4.0 * fr + f2);
            const double delta = left + right - whole;
            if (std::abs(delta) <= 15.0 * tol || (x2 - x0) < 1e-14 * (std::abs(x0) + 1.0))
                return left + right + delta / 15.0;
            if (depth > 60)
                throw std::runtime_error("quadrature: failed to converge (max depth)");
            return run(x0, x1, f0, fl, f1, left, 0.5 * tol, depth + 1) +
                   run(x1, x2, f1, fr, f2, right, 0.5 * tol, depth + 1);
        }
    };

    const double fa = value(a);
    const double fm = value(0.5 * (a + b));
    const double fb = value(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return sign * Worker(value).run(a, b, fa, fm, fb, whole, tol, 0);
}

namespace detail {

/// Derivative at t of the quadratic through three grid nodes. The window is
/// centered on the node nearest to t, clamped at the ends, which reduces to
/// the usual central stencil in the interior and to the one-sided
/// second-order stencil at the span boundaries.
inline void three_point_window(const std::vector<double>& grid, double t,
                               std::size_t& i0, std::size_t& i1, std::size_t& i2) {
    const std::size_t n = grid.size();
    auto it = std::lower_bound(grid.begin(), grid.end(), t);
    std::size_t nearest;
    if (it == grid.begin()) {
        nearest = 0;
    } else if (it == grid.end()) {
        nearest = n - 1;
    } else {
        const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
        nearest = (t - grid[hi - 1] <= grid[hi] - t) ? hi - 1 : hi;
    }
    const std::size_t center = std::clamp<std::size_t>(nearest, 1, n - 2);
    i0 = center - 1;
    i1 = center;
    i2 = center + 1;
}

inline double lagrange3_derivative(double t, double t0, double t1, double t2, double y0,
                                   double y1, double y2) {
    return y0 * (2.0 * t - t1 - t2) / ((t0 - t1) * (t0 - t2)) +
           y1 * (2.0 * t - t0 - t2) / ((t1 - t0) * (t1 - t2)) +
           y2 * (2.0 * t - t0 - t1) / ((t2 - t0) * (t2 - t1));
}

}  // namespace detail

/// Second-order finite-difference derivative of a sampled curve at time t.
inline std::vector<double> sampled_derivative(const SampledCurve& curve, double t) {
    curve.validate();
    const std::size_t n = curve.grid.size();
    if (n < 3) throw std::invalid_argument("sampled_derivative: need at least 3 samples");
    const double span = curve.grid.back() - curve.grid.front();
    const double slack = 1e-12 * std::max(span, 1.0);
    if (t < curve.grid.front() - slack || t > curve.grid.back() + slack)
        throw std::out_of_range("sampled_derivative: t outside sampled span");
    std::size_t i0, i1, i2;
    detail::three_point_window(curve.grid, t, i0, i1, i2);
    const std::size_t dim = curve.values.front().size();
    std::vector<double> d(dim);
    for (std::size_t c = 0; c < dim; ++c)
        d[c] = detail::lagrange3_derivative(t, curve.grid[i0], curve.grid[i1], curve.grid[i2],
                                            curve.values[i0][c], curve.values[i1][c],
                                            curve.values[i2][c]);
    return d;
}

/// Linear interpolation of a sampled curve component at time t.
inline double sampled_value(const SampledCurve& curve, double t, std::size_t component) {
    const std::size_t n = curve.grid.size();
    if (n == 0) throw std::invalid_argument("sampled_value: empty curve");
    const double span = curve.grid.back() - curve.grid.front();
    const double slack = 1e-12 * std::max(span, 1.0);
    if (t < curve.grid.front() - slack || t > curve.grid.back() + slack)
        throw std::out_of_range("sampled_value: t outside sampled span");
    if (t <= curve.grid.front()) return curve.values.front().at(component);
    if (t >= curve.grid.back()) return curve.values.back().at(component);
    const auto it = std::upper_bound(curve.grid.begin(), curve.grid.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - curve.grid.begin());
    const double t0 = curve.grid[hi - 1], t1 = curve.grid[hi];
    const double w = (t - t0) / (t1 - t0);
    return (1.0 - w) * curve.values[hi - 1].at(component) + w * curve.values[hi].at(component);
}

}  // namespace lieosc
