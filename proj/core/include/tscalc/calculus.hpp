#pragma once

#include <functional>
#include <memory>

#include "tscalc/errors.hpp"
#include "tscalc/time_scale.hpp"

namespace tscalc {

/// Convex-combination weight, validated to lie in [0,1].
class Alpha {
public:
    explicit Alpha(double v) : v_(v) {
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("alpha must lie in [0,1]");
    }
    double value() const { return v_; }
    bool is_zero() const { return v_ == 0.0; }
    bool is_one() const { return v_ == 1.0; }

private:
    double v_;
};

enum class Continuity : std::uint8_t { RdContinuous, LdContinuous, Both };

/// A real-valued function on a time scale.
///
/// Evaluation is point-based so map-backed functions can rely on exact point
/// identity; plain callables of the real coordinate are wrapped. A classical
/// derivative may be attached for use at dense points; without one, the
/// derivative operators fall back to finite differences inside the segment.
class TSFunction {
public:
    static TSFunction from_value(std::function<double(double)> f) {
        TSFunction g;
        g.value_ = [fn = std::move(f)](const Point& p) { return fn(p.value()); };
        return g;
    }
    static TSFunction from_point(std::function<double(const Point&)> f) {
        TSFunction g;
        g.value_ = std::move(f);
        return g;
    }
    static TSFunction constant(double c) {
        return from_value([c](double) { return c; });
    }

    TSFunction with_classical_derivative(std::function<double(double)> df) const {
        TSFunction g = *this;
        g.derivative_ = [fn = std::move(df)](const Point& p) { return fn(p.value()); };
        return g;
    }
    TSFunction with_continuity(Continuity c) const {
        TSFunction g = *this;
        g.continuity_ = c;
        return g;
    }

    double operator()(const Point& p) const { return value_(p); }
    bool has_classical_derivative() const { return static_cast<bool>(derivative_); }
    double classical_derivative_at(const Point& p) const { return derivative_(p); }
    Continuity continuity() const { return continuity_; }

private:
    TSFunction() = default;
    std::function<double(const Point&)> value_;
    std::function<double(const Point&)> derivative_;
    Continuity continuity_ = Continuity::Both;
};

/// Delta derivative at t: difference quotient toward sigma(t) when t is
/// right-scattered, classical derivative (supplied or finite-difference)
/// when right-dense. t must lie in T^kappa.
double delta_derivative(const TSFunction& f, const TimeScale& ts, const Point& t);

/// Nabla derivative, the mirror toward rho(t); t must lie in T_kappa.
double nabla_derivative(const TSFunction& f, const TimeScale& ts, const Point& t);

/// alpha * delta + (1-alpha) * nabla. At alpha exactly 0 or 1 the unused
/// one-sided derivative is never evaluated.
double diamond_derivative(const TSFunction& f, const TimeScale& ts, const Point& t, Alpha a);

/// Integral of f over [a,b]: sum of mu(s) f(s) over right-scattered s in
/// [a,b) plus classical quadrature over dense stretches. Requires a <= b.
double delta_integral(const TSFunction& f, const TimeScale& ts, const Point& a, const Point& b);

/// Sum of nu(s) f(s) over left-scattered s in (a,b] plus dense quadrature.
double nabla_integral(const TSFunction& f, const TimeScale& ts, const Point& a, const Point& b);

/// alpha * delta_integral + (1-alpha) * nabla_integral.
double diamond_integral(const TSFunction& f, const TimeScale& ts, const Point& a, const Point& b,
                        Alpha alpha);

} // namespace tscalc
