#include "tscalc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <variant>

#include "tscalc/format.hpp"
#include "tscalc/quadrature.hpp"

namespace tscalc {

namespace {

constexpr double kQuadTol = 1e-12;
constexpr int kQuadDepth = 40;

// Change-ratio streak length that declares an infinite product divergent,
// and the factor size below which the product is considered asymptotic
// (transient head factors may grow without meaning divergence).
constexpr int kDivergenceStreak = 64;
constexpr double kAsymptoticFactor = 1e-2;

struct Mat2 {
    double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
};

Mat2 left_multiply(const TransitionMatrix& a, const Mat2& m) {
    // [[a,1],[b,0]] * m
    return {a.a * m.m00 + m.m10, a.a * m.m01 + m.m11, a.b * m.m00, a.b * m.m01};
}

StateRow row_times(const StateRow& y, const Mat2& m) {
    return {y.y * m.m00 + y.y_prev * m.m10, y.y * m.m01 + y.y_prev * m.m11};
}

/// Geometric segment whose points accumulate at the right-dense point t from
/// above, or -1 when the dense side above t is an interval / absent.
std::int32_t accumulation_segment_above(const TimeScale& ts, const Point& t) {
    std::int32_t seg = t.segment();
    if (!(t.kind() == Point::Kind::Zero &&
          !std::get<GeometricGrid>(ts.segments()[static_cast<std::size_t>(seg)]).negative))
        seg += 1;
    if (static_cast<std::size_t>(seg) >= ts.segments().size()) return -1;
    const auto* gg = std::get_if<GeometricGrid>(&ts.segments()[static_cast<std::size_t>(seg)]);
    if (!gg || gg->negative || gg->lo_exponent) return -1;
    return seg;
}

/// True when a sigma-chain starting at cur can only approach (never reach)
/// the accumulation point 0 before getting to `target`.
bool ascent_blocked(const TimeScale& ts, const Point& cur, const Point& target) {
    if (cur.kind() != Point::Kind::Grid) return false;
    const auto* gg = std::get_if<GeometricGrid>(&ts.segments()[static_cast<std::size_t>(cur.segment())]);
    if (!gg || !gg->negative || gg->lo_exponent) return false;
    return target.segment() != cur.segment() || target.kind() != Point::Kind::Grid;
}

} // namespace

double apply_L(const TSFunction& p, const TimeScale& ts, Alpha alpha, const TSFunction& y,
               const Point& t) {
    return diamond_derivative(y, ts, t, alpha) - p(t) * y(t);
}

TransitionMatrix transition_matrix(const TimeScale& ts, const TSFunction& p, Alpha alpha,
                                   const Point& t) {
    if (alpha.is_zero() || alpha.is_one())
        throw ValidationError("transition matrix is defined for alpha strictly inside (0,1)");
    ts.require(t);
    const double mu_t = mu(ts, t);
    const double nu_t = nu(ts, t);
    if (mu_t == 0.0 || nu_t == 0.0)
        throw ValidationError("transition matrix needs a two-sided scattered point; t = " +
                              format_real(t.value()) + " is dense on one side");
    const double a = alpha.value();
    TransitionMatrix m;
    m.b = (1.0 - a) * mu_t / (a * nu_t);
    m.a = 1.0 + mu_t * p(t) / a - m.b;
    return m;
}

StateRow propagate_forward(const TimeScale& ts, const TSFunction& p, Alpha alpha, StateRow y0,
                           const Point& t0, const Point& t) {
    ts.require(t0);
    ts.require(t);
    if (t < t0) throw ValidationError("propagate_forward requires t0 <= t");
    StateRow y = y0;
    Point cur = t0;
    while (cur < t) {
        if (ascent_blocked(ts, cur, t))
            throw ValidationError("span contains the accumulation point 0");
        const Point s = sigma(ts, cur);
        if (s == cur)
            throw ValidationError("dense point at " + format_real(cur.value()) +
                                  " inside a scattered span");
        y = advance(y, transition_matrix(ts, p, alpha, cur));
        cur = s;
    }
    return y;
}

AccumulationResult propagate_from_accumulation(const TimeScale& ts, const TSFunction& p,
                                               Alpha alpha, StateRow y0, const Point& t0,
                                               const Point& t, const SolveOptions& opts) {
    if (alpha.is_zero() || alpha.is_one())
        throw ValidationError("accumulation product is defined for alpha strictly inside (0,1)");
    ts.require(t0);
    ts.require(t);
    if (sigma(ts, t0) != t0)
        throw ValidationError("t0 = " + format_real(t0.value()) +
                              " is not a right-dense accumulation point");
    const std::int32_t gseg = accumulation_segment_above(ts, t0);
    if (gseg < 0 || t0.value() != segment_lo(ts.segments()[static_cast<std::size_t>(gseg)]))
        throw ValidationError("no geometric lattice accumulates at t0 = " +
                              format_real(t0.value()));
    if (t.segment() != gseg || t.kind() != Point::Kind::Grid || !(t0 < t))
        throw ValidationError("target must be a lattice point above the accumulation point");

    const auto& gg = std::get<GeometricGrid>(ts.segments()[static_cast<std::size_t>(gseg)]);
    const double a = alpha.value();
    AccumulationResult res;
    res.limit_b = (1.0 - a) * gg.ratio / a;

    Mat2 m;
    StateRow v = y0;
    int stable = 0;
    int growth = 0;
    double prev_change = std::numeric_limits<double>::infinity();
    for (std::int64_t k = 1; k <= opts.max_factors; ++k) {
        const Point pk = ts.grid_point(gseg, t.grid_index() - k);
        const double mu_pk = mu(ts, pk);
        if (mu_pk == 0.0) break; // exponent underflowed; the tail is exhausted
        m = left_multiply(transition_matrix(ts, p, alpha, pk), m);
        const StateRow nv = row_times(y0, m);
        const double change =
            std::max(std::abs(nv.y - v.y), std::abs(nv.y_prev - v.y_prev));
        const double scale = std::max({1.0, std::abs(nv.y), std::abs(nv.y_prev)});
        res.depth = k;
        v = nv;
        if (change <= opts.tol * scale) {
            if (++stable >= 3) {
                res.state = v;
                res.converged = true;
                return res;
            }
        } else {
            stable = 0;
        }
        const bool asymptotic = std::abs(mu_pk * p(pk)) / a < kAsymptoticFactor;
        if (asymptotic && change >= prev_change && change > opts.tol * scale) {
            if (++growth >= kDivergenceStreak) {
                res.state = v;
                res.converged = false;
                return res;
            }
        } else {
            growth = 0;
        }
        prev_change = change;
    }
    res.state = v;
    res.converged = false;
    return res;
}

StateRow propagate_dense(const TimeScale& ts, const TSFunction& p, StateRow y0, const Point& t0,
                         const Point& t) {
    ts.require(t0);
    ts.require(t);
    if (t < t0) throw ValidationError("propagate_dense requires t0 <= t");
    bool inside = false;
    for (const Segment& s : ts.segments()) {
        if (const auto* iv = std::get_if<RealInterval>(&s))
            if (t0.value() >= iv->lo && t.value() <= iv->hi) {
                inside = true;
                break;
            }
    }
    if (!inside)
        throw ValidationError("propagate_dense requires both points inside one interval segment");
    const double factor = std::exp(adaptive_simpson([&](double x) { return p(ts.at(x)); },
                                                    t0.value(), t.value(), kQuadTol, kQuadDepth));
    return {y0.y * factor, y0.y_prev * factor};
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

namespace {

std::string positive_divergence_message(double q, double b) {
    return "transition-matrix product from the accumulation point 0 diverges: b = (1-alpha)q/alpha"
           " = " +
           format_real(b) + " >= 1, i.e. alpha <= q/(q+1) = " + format_real(q / (q + 1.0)) +
           "; the diamond-alpha exponential is defined only for alpha > q/(q+1)";
}

std::string negative_divergence_message(double q, double b) {
    return "transition-matrix product ascending into the accumulation point 0 diverges: "
           "b = (1-alpha)/(alpha q) = " +
           format_real(b) + " >= 1, i.e. alpha <= 1/(q+1) = " + format_real(1.0 / (q + 1.0));
}

class Engine {
public:
    Engine(const DiamondBVP& bvp, const SolveOptions& opts)
        : ts_(bvp.ts), p_(bvp.p), alpha_(bvp.alpha), opts_(opts), forcing_(bvp.forcing),
          cur_(bvp.t0) {}

    SolutionTrace run(const Point& t0, double y0, double y_prev, std::vector<Point> targets) {
        const Point rt0 = rho(ts_, t0);
        out_[t0] = y0;
        if (rt0 != t0) out_[rt0] = y_prev;
        state_ = {y0, y_prev};
        cur_ = t0;

        for (const Point& tg : targets) {
            if (tg < rt0)
                throw ValidationError("target " + format_real(tg.value()) +
                                      " lies below the anchor; backward construction is not "
                                      "supported");
            while (cur_ < tg) step_toward(tg);
        }
        SolutionTrace trace;
        trace.samples.reserve(out_.size());
        for (const auto& [pt, val] : out_) trace.samples.push_back({pt, val});
        trace.max_truncation_depth = max_depth_;
        trace.used_accumulation_product = used_accumulation_;
        return trace;
    }

private:
    void step_toward(const Point& tg) {
        if (ascent_blocked(ts_, cur_, tg)) {
            ascend_to_accumulation();
            return;
        }
        const Point s = sigma(ts_, cur_);
        if (s != cur_) {
            scattered_step(s);
            return;
        }
        dense_side(tg);
    }

    void scattered_step(const Point& s) {
        const double mu_c = mu(ts_, cur_);
        double next;
        if (alpha_.is_one()) {
            next = (1.0 + mu_c * p_(cur_)) * state_.y + mu_c * force(cur_);
        } else if (alpha_.is_zero()) {
            const double denom = 1.0 - mu_c * p_(s); // nu(s) = mu(cur)
            if (denom == 0.0)
                throw DomainError("p is not nu-regressive at t = " + format_real(s.value()));
            next = (state_.y + mu_c * force(s)) / denom;
        } else {
            const TransitionMatrix m = transition_matrix(ts_, p_, alpha_, cur_);
            next = m.a * state_.y + m.b * state_.y_prev + mu_c * force(cur_) / alpha_.value();
        }
        state_ = {next, state_.y};
        cur_ = s;
        out_[cur_] = state_.y;
    }

    void dense_side(const Point& tg) {
        require_homogeneous("dense stretch");
        // A run inside the cursor's own interval segment comes first; only a
        // point sitting at a junction looks at the segment above.
        if (cur_.kind() == Point::Kind::Dense) {
            const auto& own =
                std::get<RealInterval>(ts_.segments()[static_cast<std::size_t>(cur_.segment())]);
            if (cur_.value() < own.hi) {
                interval_run(cur_.segment(), tg);
                return;
            }
        }
        const std::int32_t gseg = accumulation_segment_above(ts_, cur_);
        if (gseg >= 0) {
            descend_from_accumulation(gseg, tg);
            return;
        }
        const std::int32_t aseg = cur_.segment() + 1;
        if (static_cast<std::size_t>(aseg) >= ts_.segments().size())
            throw ValidationError("propagation ran past the last segment"); // unreachable
        interval_run(aseg, tg);
    }

    void interval_run(std::int32_t aseg, const Point& tg) {
        const auto& iv = std::get<RealInterval>(ts_.segments()[static_cast<std::size_t>(aseg)]);
        const bool inside = tg.segment() == aseg && tg.kind() == Point::Kind::Dense;
        const Point end = inside ? tg : ts_.at(iv.hi, 0.0);
        state_ = propagate_dense(ts_, p_, state_, cur_, end);
        state_.y_prev = state_.y; // rho(end) = end on the dense side
        cur_ = end;
        out_[cur_] = state_.y;
    }

    void descend_from_accumulation(std::int32_t gseg, const Point& tg) {
        if (alpha_.is_zero() || alpha_.is_one())
            throw ValidationError("internal: accumulation descent at boundary alpha"); // unreachable
        const auto& gg = std::get<GeometricGrid>(ts_.segments()[static_cast<std::size_t>(gseg)]);
        Point first = cur_;
        if (tg.segment() == gseg && tg.kind() == Point::Kind::Grid) {
            first = tg;
        } else {
            if (!gg.hi_exponent)
                throw ValidationError("propagation target beyond the lattice"); // unreachable
            first = ts_.grid_point(gseg, *gg.hi_exponent);
        }
        state_.y_prev = state_.y; // the junction is left-dense
        const AccumulationResult res =
            propagate_from_accumulation(ts_, p_, alpha_, state_, cur_, first, opts_);
        used_accumulation_ = true;
        max_depth_ = std::max(max_depth_, res.depth);
        if (!res.converged) throw DivergenceError(positive_divergence_message(gg.ratio, res.limit_b));
        state_ = res.state;
        cur_ = first;
        out_[cur_] = state_.y;
        out_[rho(ts_, cur_)] = state_.y_prev;
    }

    void ascend_to_accumulation() {
        require_homogeneous("accumulation stretch");
        if (alpha_.is_zero() || alpha_.is_one())
            throw ValidationError("internal: accumulation ascent at boundary alpha"); // unreachable
        const auto& gg =
            std::get<GeometricGrid>(ts_.segments()[static_cast<std::size_t>(cur_.segment())]);
        const double a = alpha_.value();
        const double b_limit = (1.0 - a) / (a * gg.ratio);
        int stable = 0;
        int growth = 0;
        double prev_change = std::numeric_limits<double>::infinity();
        for (std::int64_t k = 1; k <= opts_.max_factors; ++k) {
            const double mu_c = mu(ts_, cur_);
            if (mu_c == 0.0) break; // exponent underflow, tail exhausted
            const TransitionMatrix m = transition_matrix(ts_, p_, alpha_, cur_);
            state_ = advance(state_, m);
            cur_ = sigma(ts_, cur_);
            out_[cur_] = state_.y;
            used_accumulation_ = true;
            max_depth_ = std::max(max_depth_, k);
            const double change = std::abs(state_.y - state_.y_prev);
            const double scale = std::max(1.0, std::abs(state_.y));
            if (change <= opts_.tol * scale) {
                if (++stable >= 3) {
                    finish_ascent();
                    return;
                }
            } else {
                stable = 0;
            }
            const bool asymptotic = std::abs(mu_c * p_(cur_)) / a < kAsymptoticFactor;
            if (asymptotic && change >= prev_change && change > opts_.tol * scale) {
                if (++growth >= kDivergenceStreak)
                    throw DivergenceError(negative_divergence_message(gg.ratio, b_limit));
            } else {
                growth = 0;
            }
            prev_change = change;
        }
        throw DivergenceError(negative_divergence_message(gg.ratio, b_limit) +
                              " (factor cap reached before stabilization)");
    }

    void finish_ascent() {
        const Point zero = ts_.zero_point(cur_.segment());
        state_ = {state_.y, state_.y};
        cur_ = zero;
        out_[cur_] = state_.y;
    }

    double force(const Point& t) const { return forcing_ ? (*forcing_)(t) : 0.0; }

    void require_homogeneous(const char* what) const {
        if (forcing_)
            throw ValidationError(std::string("nonhomogeneous solve supports purely scattered "
                                              "spans; met a ") +
                                  what + " at t = " + format_real(cur_.value()));
    }

    const TimeScale& ts_;
    const TSFunction& p_;
    Alpha alpha_;
    SolveOptions opts_;
    const std::optional<TSFunction>& forcing_;
    std::map<Point, double> out_;
    StateRow state_{1.0, 1.0};
    Point cur_;
    std::int64_t max_depth_ = 0;
    bool used_accumulation_ = false;
};

} // namespace

double SolutionTrace::value_at(const Point& t) const {
    const auto it = std::lower_bound(samples.begin(), samples.end(), t,
                                     [](const TraceSample& s, const Point& p) { return s.point < p; });
    if (it == samples.end() || !(it->point == t))
        throw ValidationError("trace holds no sample at t = " + format_real(t.value()));
    return it->value;
}

TSFunction SolutionTrace::as_function() const {
    return TSFunction::from_point([samples = samples](const Point& t) {
        const auto it =
            std::lower_bound(samples.begin(), samples.end(), t,
                             [](const TraceSample& s, const Point& p) { return s.point < p; });
        if (it == samples.end() || !(it->point == t))
            throw ValidationError("trace holds no sample at t = " + format_real(t.value()));
        return it->value;
    });
}

SolutionTrace solve(const DiamondBVP& bvp, std::vector<Point> targets, const SolveOptions& opts) {
    const TimeScale& ts = bvp.ts;
    ts.require(bvp.t0);
    const RegularityReport reg = is_regular(ts);
    if (!reg)
        throw ValidationError("diamond-alpha BVP requires a regular time scale: " + reg.reason);

    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    for (const Point& t : targets) ts.require(t);

    const double y_prev = bvp.y_prev.value_or(bvp.y0);

    if (!bvp.forcing && (bvp.alpha.is_zero() || bvp.alpha.is_one())) {
        // First-order Delta/nabla IVP: unique by (nu-)regressivity, solved by
        // the corresponding exponential. The second condition is vacuous.
        std::map<Point, double> out;
        out[bvp.t0] = bvp.y0;
        for (const Point& tg : targets) {
            if (tg < bvp.t0)
                throw ValidationError("target " + format_real(tg.value()) +
                                      " lies below the anchor; backward construction is not "
                                      "supported");
            const ExpValue e = bvp.alpha.is_one() ? delta_exp(bvp.p, ts, tg, bvp.t0)
                                                  : nabla_exp(bvp.p, ts, tg, bvp.t0);
            out[tg] = bvp.y0 * e.value;
        }
        SolutionTrace trace;
        trace.samples.reserve(out.size());
        for (const auto& [pt, val] : out) trace.samples.push_back({pt, val});
        return trace;
    }

    Engine engine(bvp, opts);
    return engine.run(bvp.t0, bvp.y0, y_prev, std::move(targets));
}

SolutionTrace diamond_exponential(const TimeScale& ts, Alpha alpha, const TSFunction& p,
                                  const Point& t0, std::vector<Point> targets,
                                  const SolveOptions& opts) {
    DiamondBVP bvp{ts, alpha, p, t0, 1.0, std::nullopt, std::nullopt};
    return solve(bvp, std::move(targets), opts);
}

SecondOrderForm to_second_order_delta(const DiamondBVP& bvp) {
    if (bvp.alpha.is_zero() || bvp.alpha.is_one())
        throw ValidationError("the second-order Delta form exists for alpha strictly inside (0,1)");
    const TimeScale& ts = bvp.ts;
    ts.require(bvp.t0);
    const Point s0 = rho(ts, bvp.t0);
    if (s0 == bvp.t0)
        throw ValidationError("t0 has no scattered left neighbor; the second condition is vacuous");
    const double a = bvp.alpha.value();
    const TSFunction p = bvp.p;
    const TimeScale ts_copy = ts;
    SecondOrderForm form{
        TSFunction::from_point([p, ts_copy, a](const Point& s) {
            const double mu_s = mu(ts_copy, s);
            if (mu_s == 0.0)
                throw DomainError("second-order coefficients need mu(s) != 0 at s = " +
                                  format_real(s.value()));
            return (1.0 - p(sigma(ts_copy, s)) * mu_s) / (a * mu_s);
        }),
        TSFunction::from_point([p, ts_copy, a](const Point& s) {
            const double mu_s = mu(ts_copy, s);
            if (mu_s == 0.0)
                throw DomainError("second-order coefficients need mu(s) != 0 at s = " +
                                  format_real(s.value()));
            return -p(sigma(ts_copy, s)) / (a * mu_s);
        }),
        s0,
        bvp.y_prev.value_or(bvp.y0),
        bvp.y0,
    };
    return form;
}

SolutionTrace solve_nonhomogeneous(const DiamondBVP& bvp, std::vector<Point> targets,
                                   const SolveOptions& opts) {
    if (!bvp.forcing) {
        DiamondBVP homogeneous = bvp;
        homogeneous.forcing = TSFunction::constant(0.0);
        return solve(homogeneous, std::move(targets), opts);
    }
    return solve(bvp, std::move(targets), opts);
}

} // namespace tscalc
