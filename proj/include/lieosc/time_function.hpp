#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>

#include "lieosc/ode.hpp"

namespace lieosc {

/// A scalar function of time together with a way to evaluate its derivative.
/// Catalog curves carry analytic derivatives; curves produced by gauge
/// transformations fall back to a central difference; sampled curves use the
/// three-point stencils of the ODE layer.
class TimeFunction {
  public:
    TimeFunction() = default;

    static TimeFunction analytic(std::function<double(double)> value,
                                 std::function<double(double)> deriv) {
        TimeFunction f;
        f.value_ = std::move(value);
        f.deriv_ = std::move(deriv);
        return f;
    }

    static TimeFunction constant(double c) {
        return analytic([c](double) { return c; }, [](double) { return 0.0; });
    }

    /// Value function with a symmetric-difference derivative. The step is
    /// cbrt(eps), balancing truncation against roundoff for smooth values.
    static TimeFunction numeric(std::function<double(double)> value) {
        TimeFunction f;
        auto v = std::make_shared<std::function<double(double)>>(std::move(value));
        f.value_ = [v](double t) { return (*v)(t); };
        f.deriv_ = [v](double t) {
            constexpr double h = 6.0554544523933429e-6;
            return ((*v)(t + h) - (*v)(t - h)) / (2.0 * h);
        };
        return f;
    }

    /// One component of a sampled curve: linear interpolation for values,
    /// finite-difference stencil for the derivative.
    static TimeFunction from_samples(std::shared_ptr<const SampledCurve> samples,
                                     std::size_t component) {
        if (!samples) throw std::invalid_argument("TimeFunction: null sample curve");
        samples->validate();
        TimeFunction f;
        f.value_ = [samples, component](double t) {
            return sampled_value(*samples, t, component);
        };
        f.deriv_ = [samples, component](double t) {
            return sampled_derivative(*samples, t).at(component);
        };
        return f;
    }

    double operator()(double t) const {
        if (!value_) throw std::logic_error("TimeFunction: empty value handle");
        return value_(t);
    }

    double derivative(double t) const {
        if (!deriv_) throw std::logic_error("TimeFunction: empty derivative handle");
        return deriv_(t);
    }

    bool valid() const { return static_cast<bool>(value_); }

  private:
    std::function<double(double)> value_;
    std::function<double(double)> deriv_;
};

}  // namespace lieosc
