#include "tscalc/calculus.hpp"

#include <cmath>

#include "tscalc/format.hpp"
#include "tscalc/quadrature.hpp"
#include "walk.hpp"

namespace tscalc {

namespace {

double simpson_rule(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double x0, double x1, double f0,
                     double fm, double f1, double whole, double tol, int depth) {
    const double m = 0.5 * (x0 + x1);
    const double lm = 0.5 * (x0 + m);
    const double rm = 0.5 * (m + x1);
    const double flm = f(lm);
    const double frm = f(rm);
    if (!std::isfinite(flm) || !std::isfinite(frm))
        throw QuadratureError("integrand is not finite inside [" + format_real(x0) + "," +
                              format_real(x1) + "]");
    const double left = simpson_rule(f0, flm, fm, m - x0);
    const double right = simpson_rule(fm, frm, f1, x1 - m);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0)
        throw QuadratureError("quadrature did not reach tolerance on [" + format_real(x0) + "," +
                              format_real(x1) + "]");
    return adaptive_step(f, x0, m, f0, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, x1, fm, frm, f1, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double x0, double x1,
                        double abs_tol, int max_depth) {
    if (x0 == x1) return 0.0;
    if (!std::isfinite(x0) || !std::isfinite(x1))
        throw QuadratureError("quadrature over an unbounded range");
    const double fa = f(x0);
    const double fb = f(x1);
    const double fm = f(0.5 * (x0 + x1));
    if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb))
        throw QuadratureError("integrand is not finite on [" + format_real(x0) + "," +
                              format_real(x1) + "]");
    const double whole = simpson_rule(fa, fm, fb, x1 - x0);
    return adaptive_step(f, x0, x1, fa, fm, fb, whole, abs_tol, max_depth);
}

namespace {

constexpr double kQuadTol = 1e-12;
constexpr int kQuadDepth = 40;

double fd_step(double t) { return std::max(1e-6, 1e-8 * std::abs(t)); }

/// Finite-difference fallback at a right-dense point of an interval segment.
double dense_forward_fd(const TSFunction& f, const TimeScale& ts, const Point& t) {
    const auto& iv = std::get<RealInterval>(ts.segments()[static_cast<std::size_t>(t.segment())]);
    const double x = t.value();
    double h = fd_step(x);
    const double width = iv.hi - iv.lo;
    if (std::isfinite(width)) h = std::min(h, width / 4.0);
    auto eval = [&](double y) { return f(ts.dense_point(t.segment(), y)); };
    if (x - h >= iv.lo && x + h <= iv.hi)
        return (eval(x + h) - eval(x - h)) / (2.0 * h);
    if (x + 2.0 * h <= iv.hi) // one-sided, second order, toward the interior
        return (-3.0 * eval(x) + 4.0 * eval(x + h) - eval(x + 2.0 * h)) / (2.0 * h);
    if (x - 2.0 * h >= iv.lo)
        return (3.0 * eval(x) - 4.0 * eval(x - h) + eval(x - 2.0 * h)) / (2.0 * h);
    throw ValidationError("no neighborhood available for a finite-difference derivative at " +
                          format_real(x));
}

/// Richardson two-node slope through geometric points converging to t from
/// the given side (t is the accumulation point, value 0).
double accumulation_fd(const TSFunction& f, const TimeScale& ts, const Point& t,
                       std::int32_t geo_seg) {
    const auto& gg = std::get<GeometricGrid>(ts.segments()[static_cast<std::size_t>(geo_seg)]);
    const double q = gg.ratio;
    const double h = fd_step(t.value());
    const auto k1 = static_cast<std::int64_t>(std::floor(std::log(h) / std::log(q)));
    const Point s1 = ts.grid_point(geo_seg, k1);
    const Point s2 = ts.grid_point(geo_seg, k1 - 1);
    const double f0 = f(t);
    const double d1 = (f(s1) - f0) / (s1.value() - t.value());
    const double d2 = (f(s2) - f0) / (s2.value() - t.value());
    return (q * d2 - d1) / (q - 1.0);
}

/// Segment carrying the dense points immediately above/below a dense-side
/// point; identifies the geometric lattice for accumulation fallbacks.
std::int32_t segment_above(const TimeScale& ts, const Point& t) {
    if (t.kind() == Point::Kind::Zero &&
        !std::get<GeometricGrid>(ts.segments()[static_cast<std::size_t>(t.segment())]).negative)
        return t.segment();
    return t.segment() + 1;
}

std::int32_t segment_below(const TimeScale& ts, const Point& t) {
    // Junctions are owned by the lower segment, so the left side is always
    // the point's own segment.
    return t.segment();
}

} // namespace

double delta_derivative(const TSFunction& f, const TimeScale& ts, const Point& t) {
    ts.require(t);
    if (ts.bounded_above() && t == ts.max_point() && rho(ts, t) != t)
        throw ValidationError("delta derivative undefined at the left-scattered maximum " +
                              format_real(t.value()) + " (outside T^kappa)");
    const Point s = sigma(ts, t);
    if (s != t) return (f(s) - f(t)) / mu(ts, t);
    if (f.has_classical_derivative()) return f.classical_derivative_at(t);
    if (t.kind() == Point::Kind::Dense &&
        t.value() <
            std::get<RealInterval>(ts.segments()[static_cast<std::size_t>(t.segment())]).hi)
        return dense_forward_fd(f, ts, t);
    const std::int32_t above = segment_above(ts, t);
    if (static_cast<std::size_t>(above) < ts.segments().size() &&
        std::holds_alternative<GeometricGrid>(ts.segments()[static_cast<std::size_t>(above)]))
        return accumulation_fd(f, ts, t, above);
    if (t.kind() == Point::Kind::Dense) return dense_forward_fd(f, ts, t);
    // Left-dense supremum of a negative closure: the limit only has points
    // from below, which is the same classical limit.
    if (t.kind() == Point::Kind::Zero) return accumulation_fd(f, ts, t, t.segment());
    throw ValidationError("no sampling neighborhood to the right of " + format_real(t.value()));
}

double nabla_derivative(const TSFunction& f, const TimeScale& ts, const Point& t) {
    ts.require(t);
    if (ts.bounded_below() && t == ts.min_point() && sigma(ts, t) != t)
        throw ValidationError("nabla derivative undefined at the right-scattered minimum " +
                              format_real(t.value()) + " (outside T_kappa)");
    const Point r = rho(ts, t);
    if (r != t) return (f(t) - f(r)) / nu(ts, t);
    if (f.has_classical_derivative()) return f.classical_derivative_at(t);
    if (t.kind() == Point::Kind::Dense &&
        t.value() >
            std::get<RealInterval>(ts.segments()[static_cast<std::size_t>(t.segment())]).lo)
        return dense_forward_fd(f, ts, t);
    const std::int32_t below = segment_below(ts, t);
    if (std::holds_alternative<GeometricGrid>(ts.segments()[static_cast<std::size_t>(below)]) &&
        t.kind() == Point::Kind::Zero)
        return accumulation_fd(f, ts, t, below);
    if (t.kind() == Point::Kind::Dense) return dense_forward_fd(f, ts, t);
    throw ValidationError("no sampling neighborhood to the left of " + format_real(t.value()));
}

double diamond_derivative(const TSFunction& f, const TimeScale& ts, const Point& t, Alpha a) {
    if (a.is_one()) return delta_derivative(f, ts, t);
    if (a.is_zero()) return nabla_derivative(f, ts, t);
    return a.value() * delta_derivative(f, ts, t) +
           (1.0 - a.value()) * nabla_derivative(f, ts, t);
}

double delta_integral(const TSFunction& f, const TimeScale& ts, const Point& a, const Point& b) {
    if (b < a) throw ValidationError("delta integral requires a <= b");
    if (f.continuity() == Continuity::LdContinuous)
        throw ValidationError("delta integral requires an rd-continuous integrand");
    double acc = 0.0;
    detail::walk_delta(
        ts, a, b, [&](const Point& s, const Point&, double mu_s) { acc += mu_s * f(s); },
        [&](double x0, double x1) {
            acc += adaptive_simpson([&](double x) { return f(ts.at(x)); }, x0, x1, kQuadTol,
                                    kQuadDepth);
        });
    return acc;
}

double nabla_integral(const TSFunction& f, const TimeScale& ts, const Point& a, const Point& b) {
    if (b < a) throw ValidationError("nabla integral requires a <= b");
    if (f.continuity() == Continuity::RdContinuous)
        throw ValidationError("nabla integral requires an ld-continuous integrand");
    double acc = 0.0;
    // nu(sigma(s)) = mu(s), and sigma maps the right-scattered points of
    // [a,b) onto the left-scattered points of (a,b].
    detail::walk_delta(
        ts, a, b, [&](const Point&, const Point& s1, double mu_s) { acc += mu_s * f(s1); },
        [&](double x0, double x1) {
            acc += adaptive_simpson([&](double x) { return f(ts.at(x)); }, x0, x1, kQuadTol,
                                    kQuadDepth);
        });
    return acc;
}

double diamond_integral(const TSFunction& f, const TimeScale& ts, const Point& a, const Point& b,
                        Alpha alpha) {
    if (alpha.is_one()) return delta_integral(f, ts, a, b);
    if (alpha.is_zero()) return nabla_integral(f, ts, a, b);
    return alpha.value() * delta_integral(f, ts, a, b) +
           (1.0 - alpha.value()) * nabla_integral(f, ts, a, b);
}

} // namespace tscalc
