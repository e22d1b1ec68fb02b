#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tscalc/calculus.hpp"
#include "tscalc/exponentials.hpp"
#include "tscalc/time_scale.hpp"

namespace tscalc {

/// Residual of the diamond-alpha linear operator: y^{diamond_alpha}(t) - p(t) y(t).
/// Linear in y. t must be diamond-differentiable (interior point).
double apply_L(const TSFunction& p, const TimeScale& ts, Alpha alpha, const TSFunction& y,
               const Point& t);

/// One-step transition matrix [[a, 1], [b, 0]] advancing the row
/// Y(t) = [y(t), y(rho(t))] to Y(sigma(t)) at a two-sided scattered point:
///   b(t) = (1-alpha) mu(t) / (alpha nu(t)),
///   a(t) = 1 + mu(t) p(t) / alpha - b(t).
/// Defined only for alpha strictly inside (0,1).
struct TransitionMatrix {
    double a = 0.0;
    double b = 0.0;
};

TransitionMatrix transition_matrix(const TimeScale& ts, const TSFunction& p, Alpha alpha,
                                   const Point& t);

/// The propagated row vector Y(t) = [y(t), y(rho(t))].
struct StateRow {
    double y = 1.0;
    double y_prev = 1.0;
};

/// Y * [[a,1],[b,0]]: the new first component is a y + b y_prev, the old y
/// shifts into second place.
inline StateRow advance(const StateRow& s, const TransitionMatrix& m) {
    return {m.a * s.y + m.b * s.y_prev, s.y};
}

/// Ordered product of transition matrices over the purely scattered span
/// [t0, t): Y(t) = Y0 A(t0) A(sigma(t0)) ... A(rho(t)). Throws on dense
/// points inside the span.
StateRow propagate_forward(const TimeScale& ts, const TSFunction& p, Alpha alpha, StateRow y0,
                           const Point& t0, const Point& t);

struct SolveOptions {
    /// Relative stabilization tolerance for truncated infinite products.
    double tol = 1e-12;
    /// Hard cap on the number of matrix factors in one infinite product.
    std::int64_t max_factors = 1'000'000;
};

/// Outcome of a truncated infinite product from an accumulation point.
struct AccumulationResult {
    StateRow state;
    bool converged = false;
    std::int64_t depth = 0;
    /// Limit of b(t) along the product; the product stabilizes iff < 1.
    double limit_b = 0.0;
};

/// Transports the row from a right-dense accumulation point t0 (e.g. 0 on
/// the closure of q^Z) to a lattice point t above it via the transposed
/// infinite product. Factors are multiplied inward-out until the propagated
/// row stabilizes; a non-decaying change streak flags divergence, matching
/// the criterion alpha > q/(q+1) on geometric lattices.
AccumulationResult propagate_from_accumulation(const TimeScale& ts, const TSFunction& p,
                                               Alpha alpha, StateRow y0, const Point& t0,
                                               const Point& t, const SolveOptions& opts = {});

/// Inside one real interval: Y(t) = Y(t0) exp(integral of p) I.
StateRow propagate_dense(const TimeScale& ts, const TSFunction& p, StateRow y0, const Point& t0,
                         const Point& t);

/// The boundary-value problem y^{diamond_alpha} = p y + f with
/// y(t0) = y0 and alpha(1-alpha) y(rho(t0)) = alpha(1-alpha) y_prev.
/// The second condition is vacuous at alpha in {0,1} and when rho(t0) = t0.
struct DiamondBVP {
    TimeScale ts;
    Alpha alpha;
    TSFunction p;
    Point t0;
    double y0 = 1.0;
    /// Value at rho(t0); defaults to y0, the pairing of the exponential.
    std::optional<double> y_prev;
    /// Forcing term; empty means the homogeneous equation.
    std::optional<TSFunction> forcing;
};

struct TraceSample {
    Point point;
    double value;
};

/// Solution samples in ascending point order, including every scattered
/// point visited between the anchor and the last target.
struct SolutionTrace {
    std::vector<TraceSample> samples;
    std::int64_t max_truncation_depth = 0;
    bool used_accumulation_product = false;

    double value_at(const Point& t) const;
    /// The trace as an exactly point-keyed TSFunction (for residual checks).
    TSFunction as_function() const;
};

/// Forward construction of the BVP solution at the requested targets.
///
/// Propagation chains matrix products over scattered runs, truncated
/// infinite products out of accumulation points and exponential scaling over
/// dense runs, re-seeding the row at switching points. At alpha in {0,1}
/// the problem is the first-order Delta/nabla IVP and is integrated through
/// the corresponding exponential. Targets below rho(t0) are rejected
/// (backward construction is not provided); rho(t0) itself is served from
/// the boundary data. Throws DivergenceError when an infinite product does
/// not stabilize.
SolutionTrace solve(const DiamondBVP& bvp, std::vector<Point> targets,
                    const SolveOptions& opts = {});

/// E_{alpha,p}(., t0): solve with y(t0) = y(rho(t0)) = 1. The value at t is
/// the sandwich [1 1] S(t0,t) [1 0]^T, i.e. the first row component.
SolutionTrace diamond_exponential(const TimeScale& ts, Alpha alpha, const TSFunction& p,
                                  const Point& t0, std::vector<Point> targets,
                                  const SolveOptions& opts = {});

/// The equivalent second-order Delta form on scattered points:
///   y^{DeltaDelta}(s) + p_tilde(s) y^Delta(s) + q_tilde(s) y(s) = 0,
///   p_tilde = (1 - p^sigma mu) / (alpha mu), q_tilde = -p^sigma / (alpha mu),
/// with boundary values at s0 = rho(t0) and sigma(s0) = t0. The coefficients
/// satisfy 1 - mu p_tilde + mu^2 q_tilde = 1 - 1/alpha identically.
struct SecondOrderForm {
    TSFunction p_tilde;
    TSFunction q_tilde;
    Point s0;
    double y_at_s0;
    double y_at_sigma_s0;
};

SecondOrderForm to_second_order_delta(const DiamondBVP& bvp);

/// Forced variant y^{diamond_alpha} = p y + f on purely scattered spans:
/// y(sigma(t)) = a y + b y^rho + mu(t) f(t) / alpha. Dense or accumulation
/// stretches on the propagation path are rejected.
SolutionTrace solve_nonhomogeneous(const DiamondBVP& bvp, std::vector<Point> targets,
                                   const SolveOptions& opts = {});

} // namespace tscalc
