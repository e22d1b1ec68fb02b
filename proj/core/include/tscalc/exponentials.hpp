#pragma once

#include <vector>

#include "tscalc/calculus.hpp"
#include "tscalc/time_scale.hpp"

namespace tscalc {

/// Cylinder transform xi_h(z) = Log(1 + z h)/h, real branch; xi_0(z) = z.
/// Requires 1 + z h > 0 when h > 0.
double cylinder(double z, double h);

/// nu-cylinder transform -Log(1 - z h)/h; identity at h = 0.
/// Requires 1 - z h > 0 when h > 0.
double nu_cylinder(double z, double h);

/// Findings of the regressivity scan: 1 + mu(t) p(t) != 0 (regressive) and
/// 1 - nu(t) p(t) != 0 (nu-regressive). A witness list is non-empty exactly
/// when the corresponding flag is false.
struct RegressivityReport {
    bool regressive = true;
    bool nu_regressive = true;
    std::vector<Point> mu_witnesses;
    std::vector<Point> nu_witnesses;
};

struct RegressivityOptions {
    double window_lo = -1e6;
    double window_hi = 1e6;
    /// Cap on checked points per segment; scattered points are strided
    /// evenly when a segment holds more than this inside the window.
    int samples_per_segment = 256;
};

/// Scans scattered points exhaustively inside the window (up to the budget)
/// and samples dense stretches, where the factors are identically 1 but a
/// non-finite coefficient value still counts as a violation.
RegressivityReport check_regressivity(const TSFunction& p, const TimeScale& ts,
                                      const RegressivityOptions& opts = {});

/// A signed exponential value together with the number of negative factors
/// met along the evaluation path: the sign of value is (-1)^sign_flips.
struct ExpValue {
    double value = 1.0;
    int sign_flips = 0;
};

/// Delta exponential e_p(t, t0): product of (1 + mu(s) p(s)) over the
/// right-scattered points of [t0, t) times exp of the dense integral of p.
/// For t < t0 the reciprocal over [t, t0) is used. Solves y^Delta = p y,
/// y(t0) = 1. Throws DomainError when a factor vanishes on the path.
ExpValue delta_exp(const TSFunction& p, const TimeScale& ts, const Point& t, const Point& t0);

/// Nabla exponential: product of 1/(1 - nu(s) p(s)) over left-scattered
/// points of (t0, t] times the dense factor. Solves y^nabla = p y, y(t0)=1.
ExpValue nabla_exp(const TSFunction& p, const TimeScale& ts, const Point& t, const Point& t0);

/// Coefficient q with e_p = nabla_exp(q): q = p^rho / (1 + p^rho nu).
TSFunction delta_to_nabla_param(const TSFunction& p, const TimeScale& ts);

/// Coefficient p with nabla_exp(q) = e_p: p = q^sigma / (1 - q^sigma mu).
TSFunction nabla_to_delta_param(const TSFunction& q, const TimeScale& ts);

/// e_p(rho(t), t0) computed by the shift identity
/// e_p^rho(t,t0) = e_p(t,t0) / (1 + p^rho(t) nu(t)).
double rho_shift_delta_exp(const TSFunction& p, const TimeScale& ts, const Point& t,
                           const Point& t0);

/// nabla_exp at rho(t) via (1 - p(t) nu(t)) * nabla_exp(p)(t, t0).
double rho_shift_nabla_exp(const TSFunction& p, const TimeScale& ts, const Point& t,
                           const Point& t0);

/// First combined exponential: alpha e_p + (1 - alpha) nabla_e_p.
double combined_E(Alpha alpha, const TSFunction& p, const TimeScale& ts, const Point& t,
                  const Point& t0);

/// Second combined exponential e_p^alpha * nabla_e_p^(1-alpha). Requires
/// both exponentials positive when alpha is strictly between 0 and 1; the
/// identity ln(combined_e) = alpha ln e_p + (1-alpha) ln nabla_e_p holds on
/// that domain.
double combined_e(Alpha alpha, const TSFunction& p, const TimeScale& ts, const Point& t,
                  const Point& t0);

/// Closed form for (e_p)^{diamond_alpha}(t, t0):
/// [alpha p + (1-alpha) p^rho / (1 + nu p^rho)] e_p(t, t0).
double diamond_derivative_of_delta_exp(const TSFunction& p, const TimeScale& ts, const Point& t,
                                       const Point& t0, Alpha alpha);

/// Closed form for (nabla_e_p)^{diamond_alpha}(t, t0):
/// [(1-alpha) p + alpha p^sigma / (1 - mu p^sigma)] nabla_e_p(t, t0).
double diamond_derivative_of_nabla_exp(const TSFunction& p, const TimeScale& ts, const Point& t,
                                       const Point& t0, Alpha alpha);

} // namespace tscalc
