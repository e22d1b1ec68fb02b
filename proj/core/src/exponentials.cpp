#include "tscalc/exponentials.hpp"

#include <algorithm>
#include <cmath>

#include "tscalc/format.hpp"
#include "tscalc/quadrature.hpp"
#include "walk.hpp"

namespace tscalc {

namespace {

constexpr double kQuadTol = 1e-12;
constexpr int kQuadDepth = 40;

// |1 + mu p| at or below this counts as a regressivity violation.
constexpr double kSingularTol = 1e-12;

struct PathProduct {
    double product = 1.0;
    double dense_exponent = 0.0;
    int sign_flips = 0;

    double value() const { return product * std::exp(dense_exponent); }
};

PathProduct accumulate_delta(const TSFunction& p, const TimeScale& ts, const Point& a,
                             const Point& b) {
    PathProduct acc;
    detail::walk_delta(
        ts, a, b,
        [&](const Point& s, const Point&, double mu_s) {
            const double factor = 1.0 + mu_s * p(s);
            if (factor == 0.0)
                throw DomainError("p is not regressive on the path: 1 + mu p = 0 at t = " +
                                  format_real(s.value()));
            if (factor < 0.0) ++acc.sign_flips;
            acc.product *= factor;
        },
        [&](double x0, double x1) {
            acc.dense_exponent += adaptive_simpson([&](double x) { return p(ts.at(x)); }, x0, x1,
                                                   kQuadTol, kQuadDepth);
        });
    return acc;
}

PathProduct accumulate_nabla(const TSFunction& p, const TimeScale& ts, const Point& a,
                             const Point& b) {
    PathProduct acc;
    detail::walk_delta(
        ts, a, b,
        [&](const Point&, const Point& s1, double mu_s) {
            // s1 = sigma(s) is left-scattered with nu(s1) = mu(s).
            const double denom = 1.0 - mu_s * p(s1);
            if (denom == 0.0)
                throw DomainError("p is not nu-regressive on the path: 1 - nu p = 0 at t = " +
                                  format_real(s1.value()));
            if (denom < 0.0) ++acc.sign_flips;
            acc.product /= denom;
        },
        [&](double x0, double x1) {
            acc.dense_exponent += adaptive_simpson([&](double x) { return p(ts.at(x)); }, x0, x1,
                                                   kQuadTol, kQuadDepth);
        });
    return acc;
}

} // namespace

double cylinder(double z, double h) {
    if (h < 0.0) throw ValidationError("cylinder transform requires h >= 0");
    if (h == 0.0) return z;
    const double arg = 1.0 + z * h;
    if (!(arg > 0.0))
        throw DomainError("cylinder transform outside the real branch: 1 + z h = " +
                          format_real(arg));
    return std::log(arg) / h;
}

double nu_cylinder(double z, double h) {
    if (h < 0.0) throw ValidationError("nu-cylinder transform requires h >= 0");
    if (h == 0.0) return z;
    const double arg = 1.0 - z * h;
    if (!(arg > 0.0))
        throw DomainError("nu-cylinder transform outside the real branch: 1 - z h = " +
                          format_real(arg));
    return -std::log(arg) / h;
}

namespace {

void scan_point(const TSFunction& p, const TimeScale& ts, const Point& t,
                RegressivityReport& report) {
    const double pv = p(t);
    if (!std::isfinite(pv)) {
        report.regressive = false;
        report.nu_regressive = false;
        report.mu_witnesses.push_back(t);
        report.nu_witnesses.push_back(t);
        return;
    }
    const double mu_t = mu(ts, t);
    const double nu_t = nu(ts, t);
    const double mu_factor = 1.0 + mu_t * pv;
    const double nu_factor = 1.0 - nu_t * pv;
    if (std::abs(mu_factor) <= kSingularTol * std::max(1.0, std::abs(mu_t * pv))) {
        report.regressive = false;
        report.mu_witnesses.push_back(t);
    }
    if (std::abs(nu_factor) <= kSingularTol * std::max(1.0, std::abs(nu_t * pv))) {
        report.nu_regressive = false;
        report.nu_witnesses.push_back(t);
    }
}

} // namespace

RegressivityReport check_regressivity(const TSFunction& p, const TimeScale& ts,
                                      const RegressivityOptions& opts) {
    RegressivityReport report;
    const double lo = opts.window_lo;
    const double hi = opts.window_hi;
    const auto budget = static_cast<std::int64_t>(std::max(2, opts.samples_per_segment));

    for (std::size_t i = 0; i < ts.segments().size(); ++i) {
        const auto seg = static_cast<std::int32_t>(i);
        const Segment& s = ts.segments()[i];
        if (const auto* iv = std::get_if<RealInterval>(&s)) {
            const double a = std::max(iv->lo, lo);
            const double b = std::min(iv->hi, hi);
            if (!(a < b)) continue;
            for (std::int64_t k = 0; k <= budget; ++k) {
                const double x = a + (b - a) * static_cast<double>(k) / static_cast<double>(budget);
                scan_point(p, ts, ts.dense_point(seg, std::clamp(x, iv->lo, iv->hi)), report);
            }
            continue;
        }
        if (const auto* ug = std::get_if<UniformGrid>(&s)) {
            auto k_lo = static_cast<std::int64_t>(std::ceil((lo - ug->origin) / ug->step));
            auto k_hi = static_cast<std::int64_t>(std::floor((hi - ug->origin) / ug->step));
            if (ug->lo_index) k_lo = std::max(k_lo, *ug->lo_index);
            if (ug->hi_index) k_hi = std::min(k_hi, *ug->hi_index);
            if (k_lo > k_hi) continue;
            const std::int64_t count = k_hi - k_lo + 1;
            const std::int64_t stride = std::max<std::int64_t>(1, count / budget);
            for (std::int64_t k = k_lo; k <= k_hi; k += stride)
                scan_point(p, ts, ts.grid_point(seg, k), report);
            if ((k_hi - k_lo) % stride != 0) scan_point(p, ts, ts.grid_point(seg, k_hi), report);
            continue;
        }
        const auto& gg = std::get<GeometricGrid>(s);
        const double mag_hi = std::max(std::abs(lo), std::abs(hi));
        if (mag_hi <= 0) continue;
        auto k_hi = static_cast<std::int64_t>(std::floor(std::log(mag_hi) / std::log(gg.ratio)));
        auto k_lo = k_hi - budget + 1;
        if (gg.lo_exponent) k_lo = std::max(k_lo, *gg.lo_exponent);
        if (gg.hi_exponent) k_hi = std::min(k_hi, *gg.hi_exponent);
        for (std::int64_t k = k_lo; k <= k_hi; ++k)
            scan_point(p, ts, ts.grid_point(seg, k), report);
        if (!gg.lo_exponent) scan_point(p, ts, ts.zero_point(seg), report);
    }
    return report;
}

ExpValue delta_exp(const TSFunction& p, const TimeScale& ts, const Point& t, const Point& t0) {
    if (t == t0) return {1.0, 0};
    if (t0 < t) {
        const PathProduct acc = accumulate_delta(p, ts, t0, t);
        return {acc.value(), acc.sign_flips};
    }
    const PathProduct acc = accumulate_delta(p, ts, t, t0);
    return {1.0 / acc.value(), acc.sign_flips};
}

ExpValue nabla_exp(const TSFunction& p, const TimeScale& ts, const Point& t, const Point& t0) {
    if (t == t0) return {1.0, 0};
    if (t0 < t) {
        const PathProduct acc = accumulate_nabla(p, ts, t0, t);
        return {acc.value(), acc.sign_flips};
    }
    const PathProduct acc = accumulate_nabla(p, ts, t, t0);
    return {1.0 / acc.value(), acc.sign_flips};
}

TSFunction delta_to_nabla_param(const TSFunction& p, const TimeScale& ts) {
    return TSFunction::from_point([p, ts](const Point& t) {
        const double pr = p(rho(ts, t));
        const double denom = 1.0 + pr * nu(ts, t);
        if (denom == 0.0)
            throw DomainError("conversion undefined: 1 + p^rho nu = 0 at t = " +
                              format_real(t.value()));
        return pr / denom;
    });
}

TSFunction nabla_to_delta_param(const TSFunction& q, const TimeScale& ts) {
    return TSFunction::from_point([q, ts](const Point& t) {
        const double qs = q(sigma(ts, t));
        const double denom = 1.0 - qs * mu(ts, t);
        if (denom == 0.0)
            throw DomainError("conversion undefined: 1 - q^sigma mu = 0 at t = " +
                              format_real(t.value()));
        return qs / denom;
    });
}

double rho_shift_delta_exp(const TSFunction& p, const TimeScale& ts, const Point& t,
                           const Point& t0) {
    const double denom = 1.0 + p(rho(ts, t)) * nu(ts, t);
    if (denom == 0.0)
        throw DomainError("shift identity undefined: 1 + p^rho nu = 0 at t = " +
                          format_real(t.value()));
    return delta_exp(p, ts, t, t0).value / denom;
}

double rho_shift_nabla_exp(const TSFunction& p, const TimeScale& ts, const Point& t,
                           const Point& t0) {
    return (1.0 - p(t) * nu(ts, t)) * nabla_exp(p, ts, t, t0).value;
}

double combined_E(Alpha alpha, const TSFunction& p, const TimeScale& ts, const Point& t,
                  const Point& t0) {
    if (alpha.is_one()) return delta_exp(p, ts, t, t0).value;
    if (alpha.is_zero()) return nabla_exp(p, ts, t, t0).value;
    return alpha.value() * delta_exp(p, ts, t, t0).value +
           (1.0 - alpha.value()) * nabla_exp(p, ts, t, t0).value;
}

double combined_e(Alpha alpha, const TSFunction& p, const TimeScale& ts, const Point& t,
                  const Point& t0) {
    if (alpha.is_one()) return delta_exp(p, ts, t, t0).value;
    if (alpha.is_zero()) return nabla_exp(p, ts, t, t0).value;
    const double e = delta_exp(p, ts, t, t0).value;
    const double eh = nabla_exp(p, ts, t, t0).value;
    if (!(e > 0.0) || !(eh > 0.0))
        throw DomainError("combined exponential needs positive factors for a real power "
                          "(e_p = " +
                          format_real(e) + ", nabla_e_p = " + format_real(eh) + ")");
    return std::pow(e, alpha.value()) * std::pow(eh, 1.0 - alpha.value());
}

double diamond_derivative_of_delta_exp(const TSFunction& p, const TimeScale& ts, const Point& t,
                                       const Point& t0, Alpha alpha) {
    const double a = alpha.value();
    const double pr = p(rho(ts, t));
    const double denom = 1.0 + nu(ts, t) * pr;
    if (denom == 0.0)
        throw DomainError("1 + nu p^rho = 0 at t = " + format_real(t.value()));
    const double coeff = a * p(t) + (1.0 - a) * pr / denom;
    return coeff * delta_exp(p, ts, t, t0).value;
}

double diamond_derivative_of_nabla_exp(const TSFunction& p, const TimeScale& ts, const Point& t,
                                       const Point& t0, Alpha alpha) {
    const double a = alpha.value();
    const double ps = p(sigma(ts, t));
    const double denom = 1.0 - mu(ts, t) * ps;
    if (denom == 0.0)
        throw DomainError("1 - mu p^sigma = 0 at t = " + format_real(t.value()));
    const double coeff = (1.0 - a) * p(t) + a * ps / denom;
    return coeff * nabla_exp(p, ts, t, t0).value;
}

} // namespace tscalc
