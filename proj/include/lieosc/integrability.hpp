#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lieosc/lie_system.hpp"
#include "lieosc/time_function.hpp"
#include "lieosc/transform.hpp"

namespace lieosc {

enum class IntegrableFamily { none, kcond, quartic };

inline const char* family_name(IntegrableFamily f) {
    switch (f) {
        case IntegrableFamily::kcond: return "kcond";
        case IntegrableFamily::quartic: return "quartic";
        default: return "none";
    }
}

/// Detection result: the family found, its constants, the reparametrisation
/// D(t) and the diagonal (or triangular, for the quartic family) curve that
/// reduces the system to constant coefficients.
struct IntegrabilityReport {
    IntegrableFamily family = IntegrableFamily::none;
    // kcond constants; c0 = 1 and c2 = +/-1 after normalization
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
    // quartic constants, k normalized to 1
    double u0 = 0.0, u1 = 0.0, k = 0.0;
    bool negative_branch = false;  // b0*b2 < 0 accepted with c2 = -1
    double residual = std::numeric_limits<double>::infinity();
    double span_t0 = 0.0, span_t1 = 0.0;
    TimeFunction dfun;
    std::optional<TransformCurve> reducing_transform;
};

namespace detail {

/// Ratio whose constancy is the reduction condition, evaluated with
/// |b0 b2| so both sign branches share one code path.
inline double kcond_ratio_abs(const CoefficientCurve& b, double t) {
    const double b0 = b.b0(t), b2 = b.b2(t);
    const double prod = b0 * b2;
    if (prod == 0.0 || !std::isfinite(prod))
        throw std::domain_error("kcond ratio: b0*b2 must be nonzero");
    const double numer =
        b.b1(t) + 0.5 * (b.b2.derivative(t) / b2 - b.b0.derivative(t) / b0);
    return numer / std::sqrt(std::abs(prod));
}

}  // namespace detail

/// [b1 + (log(b2/b0))'/2] / sqrt(b0 b2), the left side of the reduction
/// condition normalized to c0 = c2 = 1. Requires b0 b2 > 0 at t.
inline double kcond_ratio(const CoefficientCurve& b, double t) {
    if (!(b.b0(t) * b.b2(t) > 0.0))
        throw std::domain_error("kcond_ratio: requires b0*b2 > 0 at t");
    return detail::kcond_ratio_abs(b, t);
}

/// Tests whether the ratio is constant over the grid. On success the report
/// carries c1 = mean ratio, D = sqrt(|b0 b2|) and the diagonal reducing
/// curve with positive entries. A curve with b0 b2 < 0 everywhere is
/// accepted on the matched-sign branch (c2 = -1) and flagged.
inline IntegrabilityReport detect_kcond(const CoefficientCurve& b,
                                        const std::vector<double>& grid, double tol = 1e-6) {
    if (grid.size() < 2) throw std::invalid_argument("detect_kcond: grid too small");
    IntegrabilityReport report;
    report.span_t0 = grid.front();
    report.span_t1 = grid.back();

    int sign = 0;
    std::vector<double> ratios;
    ratios.reserve(grid.size());
    for (double t : grid) {
        const double prod = b.b0(t) * b.b2(t);
        if (prod == 0.0 || !std::isfinite(prod))
            throw std::domain_error("detect_kcond: b0*b2 vanishes on the grid");
        const int s = prod > 0.0 ? 1 : -1;
        if (sign == 0) sign = s;
        if (s != sign)
            throw std::domain_error("detect_kcond: b0*b2 changes sign on the grid");
        ratios.push_back(detail::kcond_ratio_abs(b, t));
    }
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    double residual = 0.0;
    for (double r : ratios) residual = std::max(residual, std::abs(r - mean));
    report.residual = residual;
    if (residual > tol) return report;

    report.family = IntegrableFamily::kcond;
    report.c0 = 1.0;
    report.c1 = mean;
    report.c2 = sign > 0 ? 1.0 : -1.0;
    report.negative_branch = sign < 0;

    const TimeFunction b0 = b.b0, b2 = b.b2;
    report.dfun = TimeFunction::analytic(
        [b0, b2](double t) { return std::sqrt(std::abs(b0(t) * b2(t))); },
        [b0, b2](double t) {
            const double v0 = b0(t), v2 = b2(t);
            const double d = std::sqrt(std::abs(v0 * v2));
            return 0.5 * d * (b0.derivative(t) / v0 + b2.derivative(t) / v2);
        });

    // diagonal entry (b2 c0 / (b0 c2))^(1/4), positive in both branches
    const double c2 = report.c2;
    auto q = [b0, b2, c2](double t) { return std::pow(b2(t) / (b0(t) * c2), 0.25); };
    auto qdot = [b0, b2, q](double t) {
        return 0.25 * q(t) * (b2.derivative(t) / b2(t) - b0.derivative(t) / b0(t));
    };
    auto qinv = [q](double t) { return 1.0 / q(t); };
    auto qinvdot = [q, qdot](double t) {
        const double v = q(t);
        return -qdot(t) / (v * v);
    };
    report.reducing_transform = TransformCurve(
        TimeFunction::analytic(q, qdot), TimeFunction::constant(0.0),
        TimeFunction::constant(0.0), TimeFunction::analytic(qinv, qinvdot), b.t0, b.t1);
    return report;
}

/// Membership test for the inverse-quartic frequency family: fits
/// F(t)^(-1/4) by an affine function of t (least squares) and accepts when
/// the relative fit residual stays within tol. k is normalized to 1 by
/// absorbing it into (u0, u1).
inline IntegrabilityReport detect_quartic(const std::function<double(double)>& freq_factor,
                                          double omega, const std::vector<double>& grid,
                                          double tol = 1e-6) {
    if (!freq_factor) throw std::invalid_argument("detect_quartic: missing F");
    if (grid.size() < 2) throw std::invalid_argument("detect_quartic: grid too small");
    IntegrabilityReport report;
    report.span_t0 = grid.front();
    report.span_t1 = grid.back();

    std::vector<double> g;
    g.reserve(grid.size());
    double gmax = 0.0;
    for (double t : grid) {
        const double f = freq_factor(t);
        if (!(f > 0.0) || !std::isfinite(f))
            throw std::domain_error("detect_quartic: F must be positive on the grid");
        g.push_back(std::pow(f, -0.25));
        gmax = std::max(gmax, std::abs(g.back()));
    }

    // least-squares affine fit g ~= u1 t + u0
    const double n = static_cast<double>(grid.size());
    double st = 0.0, sg = 0.0, stt = 0.0, stg = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        st += grid[i];
        sg += g[i];
        stt += grid[i] * grid[i];
        stg += grid[i] * g[i];
    }
    const double denom = n * stt - st * st;
    if (denom == 0.0) throw std::invalid_argument("detect_quartic: degenerate grid");
    double u1 = (n * stg - st * sg) / denom;
    double u0 = (sg - u1 * st) / n;
    if (std::abs(u1) < 1e-10) u1 = 0.0;  // constant-oscillator degenerate member

    double residual = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        residual = std::max(residual, std::abs(u1 * grid[i] + u0 - g[i]) / gmax);
    report.residual = residual;
    if (residual > tol) return report;
    for (double t : grid)
        if (!(u1 * t + u0 > 0.0)) return report;  // V must stay positive

    report.family = IntegrableFamily::quartic;
    report.u0 = u0;
    report.u1 = u1;
    report.k = 1.0;
    report.c0 = 1.0;
    report.c1 = 0.0;
    report.c2 = omega * omega;
    auto v = [u0, u1](double t) { return u1 * t + u0; };
    report.dfun = TimeFunction::analytic(
        [v](double t) { return 1.0 / (v(t) * v(t)); },
        [v, u1](double t) {
            const double w = v(t);
            return -2.0 * u1 / (w * w * w);
        });
    report.reducing_transform = TransformCurve(
        TimeFunction::analytic([v](double t) { return 1.0 / v(t); },
                               [v, u1](double t) {
                                   const double w = v(t);
                                   return -u1 / (w * w);
                               }),
        TimeFunction::constant(0.0), TimeFunction::constant(-u1),
        TimeFunction::analytic(v, [u1](double) { return u1; }), grid.front(), grid.back());
    return report;
}

/// The family of systems reducible to constants (c0, c1, c2) by a diagonal
/// gauge: coefficients (b0, b0'/b0 - D'/D + c1 D, D^2 c0 c2 / b0),
/// parametrised by b0(t) and the reparametrisation D(t).
inline CoefficientCurve generate_family_c2tu(const TimeFunction& b0, const TimeFunction& dfun,
                                             double c0, double c1, double c2, double t0,
                                             double t1) {
    if (!b0.valid() || !dfun.valid())
        throw std::invalid_argument("generate_family_c2tu: missing b0 or D");
    if (!(t1 > t0)) throw std::invalid_argument("generate_family_c2tu: bad span");
    constexpr int check_points = 101;
    for (int i = 0; i < check_points; ++i) {
        const double t = t0 + (t1 - t0) * static_cast<double>(i) / (check_points - 1);
        if (!(b0(t) > 0.0) || !(dfun(t) > 0.0))
            throw std::invalid_argument("generate_family_c2tu: b0 and D must be positive");
    }
    CoefficientCurve out;
    out.b0 = b0;
    out.b1 = TimeFunction::numeric([b0, dfun, c1](double t) {
        return b0.derivative(t) / b0(t) - dfun.derivative(t) / dfun(t) + c1 * dfun(t);
    });
    const double cc = c0 * c2;
    out.b2 = TimeFunction::analytic(
        [b0, dfun, cc](double t) {
            const double d = dfun(t);
            return d * d * cc / b0(t);
        },
        [b0, dfun, cc](double t) {
            const double d = dfun(t);
            const double v = d * d * cc / b0(t);
            return v * (2.0 * dfun.derivative(t) / d - b0.derivative(t) / b0(t));
        });
    out.t0 = t0;
    out.t1 = t1;
    return out;
}

}  // namespace lieosc
