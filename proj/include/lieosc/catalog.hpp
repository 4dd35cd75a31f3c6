#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "lieosc/closed_form.hpp"
#include "lieosc/lie_system.hpp"
#include "lieosc/time_function.hpp"

namespace lieosc {

/// A named oscillator family instantiated with parameters on a time span.
/// Carries the coefficient curve plus whatever extra structure the family
/// has: a closed-form solution, the frequency factor F(t) for unit-mass
/// members, and the blow-up time of singular coefficients.
struct FamilyInstance {
    std::string family;
    CoefficientCurve coeffs;
    double omega = 1.0;
    std::map<std::string, double> params;
    std::optional<double> blow_up_time;
    std::function<double(const PhaseState&, double)> closed_form_position;
    std::function<double(double)> freq_factor;  // set only when b0 == 1
    bool unit_mass = false;
};

namespace detail {

inline double require_param(const std::map<std::string, double>& params,
                            const std::string& key, const std::string& family) {
    const auto it = params.find(key);
    if (it == params.end())
        throw std::invalid_argument("family '" + family + "' requires parameter '" + key + "'");
    return it->second;
}

inline double param_or(const std::map<std::string, double>& params, const std::string& key,
                       double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

}  // namespace detail

/// Instantiates a built-in family by catalog name: "constant",
/// "caldirola-kanai", "powerlaw2" or "quartic".
inline FamilyInstance make_family(const std::string& name,
                                  const std::map<std::string, double>& params, double t0,
                                  double t1) {
    if (!(t1 > t0)) throw std::invalid_argument("make_family: span must have t1 > t0");
    FamilyInstance fam;
    fam.family = name;
    fam.params = params;
    fam.coeffs.t0 = t0;
    fam.coeffs.t1 = t1;

    if (name == "constant") {
        const double omega = detail::require_param(params, "omega", name);
        const double m0 = detail::param_or(params, "m0", 1.0);
        if (!(omega > 0.0) || !(m0 > 0.0))
            throw std::invalid_argument("constant family: omega and m0 must be positive");
        fam.omega = omega;
        fam.coeffs.b0 = TimeFunction::constant(1.0 / m0);
        fam.coeffs.b1 = TimeFunction::constant(0.0);
        fam.coeffs.b2 = TimeFunction::constant(m0 * omega * omega);
        fam.unit_mass = m0 == 1.0;
        if (fam.unit_mass) fam.freq_factor = [](double) { return 1.0; };
        fam.closed_form_position = [m0, omega](const PhaseState& xi0, double t) {
            const GroupElement e =
                exp_traceless(t * TracelessMatrix{0.0, 1.0 / m0, -m0 * omega * omega});
            return e.a11 * xi0.x + e.a12 * xi0.p;
        };
        return fam;
    }

    if (name == "caldirola-kanai") {
        const double m0 = detail::require_param(params, "m0", name);
        const double mu = detail::require_param(params, "mu", name);
        const double omega = detail::require_param(params, "omega", name);
        if (!(m0 > 0.0) || !(omega > 0.0))
            throw std::invalid_argument("caldirola-kanai family: m0, omega must be positive");
        fam.omega = omega;
        fam.coeffs.b0 = TimeFunction::analytic(
            [m0, mu](double t) { return std::exp(-mu * t) / m0; },
            [m0, mu](double t) { return -mu * std::exp(-mu * t) / m0; });
        fam.coeffs.b1 = TimeFunction::constant(0.0);
        const double b2c = m0 * omega * omega;
        fam.coeffs.b2 =
            TimeFunction::analytic([b2c, mu](double t) { return b2c * std::exp(mu * t); },
                                   [b2c, mu](double t) { return mu * b2c * std::exp(mu * t); });
        fam.closed_form_position = [m0, mu, omega](const PhaseState& xi0, double t) {
            return ck_solution(m0, mu, omega, xi0, t);
        };
        return fam;
    }

    if (name == "powerlaw2") {
        const double L = detail::require_param(params, "L", name);
        const double c1 = detail::require_param(params, "c1", name);
        const double omega = detail::require_param(params, "omega", name);
        if (!(L > 0.0) || !(omega > 0.0))
            throw std::invalid_argument("powerlaw2 family: L, omega must be positive");
        if (c1 == 0.0) throw std::invalid_argument("powerlaw2 family: c1 must be nonzero");
        fam.omega = omega;
        fam.unit_mass = true;
        fam.coeffs.b0 = TimeFunction::constant(1.0);
        fam.coeffs.b1 = TimeFunction::constant(0.0);
        auto v = [L, c1, omega](double t) { return L - c1 * omega * t; };
        fam.coeffs.b2 = TimeFunction::analytic(
            [v, omega](double t) {
                const double w = v(t);
                return omega * omega / (w * w);
            },
            [v, c1, omega](double t) {
                const double w = v(t);
                return 2.0 * c1 * omega * omega * omega / (w * w * w);
            });
        fam.freq_factor = [v](double t) {
            const double w = v(t);
            return 1.0 / (w * w);
        };
        if (c1 > 0.0) fam.blow_up_time = L / (c1 * omega);
        fam.closed_form_position = [L, c1, omega](const PhaseState& xi0, double t) {
            return powerlaw2_solution(L, c1, omega, xi0, t);
        };
        return fam;
    }

    if (name == "quartic") {
        double u0 = detail::require_param(params, "u0", name);
        double u1 = detail::require_param(params, "u1", name);
        const double omega = detail::require_param(params, "omega", name);
        const double k = detail::param_or(params, "k", 1.0);
        if (!(omega > 0.0)) throw std::invalid_argument("quartic family: omega must be positive");
        if (!(k > 0.0)) throw std::invalid_argument("quartic family: k must be positive");
        // F = k/(u1 t + u0)^4 = 1/((u1 t + u0)/k^(1/4))^4: absorb k
        const double scale = std::pow(k, -0.25);
        u0 *= scale;
        u1 *= scale;
        if (!(u0 > 0.0)) throw std::invalid_argument("quartic family: V(t0) must be positive");
        fam.omega = omega;
        fam.unit_mass = true;
        fam.params["u0"] = u0;
        fam.params["u1"] = u1;
        fam.params["k"] = 1.0;
        fam.coeffs.b0 = TimeFunction::constant(1.0);
        fam.coeffs.b1 = TimeFunction::constant(0.0);
        auto v = [u0, u1](double t) { return u1 * t + u0; };
        fam.coeffs.b2 = TimeFunction::analytic(
            [v, omega](double t) {
                const double w = v(t);
                const double w2 = w * w;
                return omega * omega / (w2 * w2);
            },
            [v, u1, omega](double t) {
                const double w = v(t);
                const double w2 = w * w;
                return -4.0 * u1 * omega * omega / (w2 * w2 * w);
            });
        fam.freq_factor = [v](double t) {
            const double w = v(t);
            const double w2 = w * w;
            return 1.0 / (w2 * w2);
        };
        if (u1 < 0.0) fam.blow_up_time = -u0 / u1;
        fam.closed_form_position = [u0, u1, omega](const PhaseState& xi0, double t) {
            return quartic_solution(u0, u1, omega, xi0, t);
        };
        return fam;
    }

    throw std::invalid_argument("make_family: unknown family '" + name + "'");
}

/// Wraps sampled coefficient rows (b0, b1, b2) as a family instance.
inline FamilyInstance make_sampled_family(SampledCurve samples, double omega = 1.0) {
    samples.validate();
    if (samples.grid.size() < 3)
        throw std::invalid_argument("make_sampled_family: need at least 3 samples");
    for (const auto& row : samples.values)
        if (row.size() != 3)
            throw std::invalid_argument("make_sampled_family: rows must be (b0, b1, b2)");
    FamilyInstance fam;
    fam.family = "sampled";
    fam.omega = omega;
    fam.coeffs.t0 = samples.grid.front();
    fam.coeffs.t1 = samples.grid.back();
    auto shared = std::make_shared<const SampledCurve>(std::move(samples));
    fam.coeffs.b0 = TimeFunction::from_samples(shared, 0);
    fam.coeffs.b1 = TimeFunction::from_samples(shared, 1);
    fam.coeffs.b2 = TimeFunction::from_samples(shared, 2);
    fam.unit_mass = true;
    for (const auto& row : shared->values)
        if (std::abs(row[0] - 1.0) > 1e-12) {
            fam.unit_mass = false;
            break;
        }
    if (fam.unit_mass) {
        const TimeFunction b2 = fam.coeffs.b2;
        const double w2 = omega * omega;
        fam.freq_factor = [b2, w2](double t) { return b2(t) / w2; };
    }
    return fam;
}

}  // namespace lieosc
