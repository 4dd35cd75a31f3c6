#pragma once

#include <cmath>
#include <stdexcept>

namespace lieosc {

/// Traceless real 2x2 matrix, an element of sl(2,R).
/// Only three entries are stored; the (2,2) entry is tied to -(1,1) so the
/// trace cannot drift under arithmetic.
struct TracelessMatrix {
    double m11 = 0.0;
    double m12 = 0.0;
    double m21 = 0.0;

    constexpr double m22() const { return -m11; }

    /// det = -m11^2 - m12*m21. Its sign selects the trigonometric,
    /// hyperbolic or parabolic branch of the exponential.
    constexpr double det() const { return -m11 * m11 - m12 * m21; }

    constexpr TracelessMatrix operator+(const TracelessMatrix& o) const {
        return {m11 + o.m11, m12 + o.m12, m21 + o.m21};
    }
    constexpr TracelessMatrix operator-(const TracelessMatrix& o) const {
        return {m11 - o.m11, m12 - o.m12, m21 - o.m21};
    }
    constexpr TracelessMatrix operator-() const { return {-m11, -m12, -m21}; }
    constexpr TracelessMatrix operator*(double s) const {
        return {s * m11, s * m12, s * m21};
    }
    friend constexpr TracelessMatrix operator*(double s, const TracelessMatrix& x) {
        return x * s;
    }
};

/// Real 2x2 matrix. Used both for SL(2,R) elements (det = 1 up to a
/// tolerance) and for plain matrix values such as curve derivatives.
struct GroupElement {
    double a11 = 1.0;
    double a12 = 0.0;
    double a21 = 0.0;
    double a22 = 1.0;

    constexpr double det() const { return a11 * a22 - a12 * a21; }

    static constexpr GroupElement identity() { return {}; }
};

/// Alias used where a value is a plain matrix rather than a group element.
using Mat2 = GroupElement;

constexpr GroupElement operator*(const GroupElement& x, const GroupElement& y) {
    return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22,
            x.a21 * y.a11 + x.a22 * y.a21, x.a21 * y.a12 + x.a22 * y.a22};
}

/// Adjugate inverse; exact only for unimodular elements.
constexpr GroupElement inverse_unimodular(const GroupElement& g) {
    return {g.a22, -g.a12, -g.a21, g.a11};
}

inline bool is_unimodular(const GroupElement& g, double det_tolerance = 1e-9) {
    return std::abs(g.det() - 1.0) <= det_tolerance;
}

/// Basis of sl(2,R) whose fundamental vector fields on T*R are the
/// oscillator fields: M0 = [[0,-1],[0,0]], M1 = [[-1/2,0],[0,1/2]],
/// M2 = [[0,0],[1,0]].
inline TracelessMatrix basis_matrix(int index) {
    switch (index) {
        case 0: return {0.0, -1.0, 0.0};
        case 1: return {-0.5, 0.0, 0.0};
        case 2: return {0.0, 0.0, 1.0};
        default: break;
    }
    throw std::invalid_argument("basis_matrix: index must be 0, 1 or 2");
}

/// Commutator [X,Y] = XY - YX. Traceless by construction.
inline TracelessMatrix bracket(const TracelessMatrix& x, const TracelessMatrix& y) {
    return {x.m12 * y.m21 - y.m12 * x.m21,
            2.0 * (x.m11 * y.m12 - y.m11 * x.m12),
            2.0 * (x.m21 * y.m11 - y.m21 * x.m11)};
}

/// Closed-form exponential of a traceless 2x2 matrix.
///
/// With d = det(X): exp(X) = c0(d) I + c1(d) X where c0 = cos(sqrt(d)),
/// c1 = sin(sqrt(d))/sqrt(d) for d > 0 and the cosh/sinh pair for d < 0;
/// both pairs are one analytic function of d, so |d| < 1e-12 is evaluated
/// by its series to avoid cancellation in the parabolic window.
/// The result has determinant c0^2 + c1^2 d = 1.
inline GroupElement exp_traceless(const TracelessMatrix& x) {
    if (!std::isfinite(x.m11) || !std::isfinite(x.m12) || !std::isfinite(x.m21))
        throw std::domain_error("exp_traceless: non-finite matrix entry");
    const double d = x.det();
    double c0;
    double c1;
    if (d > 1e-12) {
        const double theta = std::sqrt(d);
        c0 = std::cos(theta);
        c1 = std::sin(theta) / theta;
    } else if (d < -1e-12) {
        const double theta = std::sqrt(-d);
        c0 = std::cosh(theta);
        c1 = std::sinh(theta) / theta;
    } else {
        c0 = 1.0 - d / 2.0 + d * d / 24.0;
        c1 = 1.0 - d / 6.0 + d * d / 120.0;
    }
    return {c0 + c1 * x.m11, c1 * x.m12, c1 * x.m21, c0 + c1 * x.m22()};
}

struct PhaseState {
    double x = 0.0;
    double p = 0.0;
};

/// Linear action of SL(2,R) on T*R: (x,p) -> A (x,p)^T.
constexpr PhaseState apply(const GroupElement& g, const PhaseState& xi) {
    return {g.a11 * xi.x + g.a12 * xi.p, g.a21 * xi.x + g.a22 * xi.p};
}

}  // namespace lieosc
