#pragma once

// Internal: structural left-to-right traversal of a span [a, b] of a time
// scale, emitting right-scattered points and dense stretches in order. Not
// installed; shared by the integral, exponential and solver translation
// units.

#include <cmath>
#include <cstdint>
#include <variant>

#include "tscalc/time_scale.hpp"

namespace tscalc::detail {

// Exponent cutoff for tails descending into a geometric accumulation point:
// a point contributes relative to the piece's top value; below this factor
// the remaining tail is beyond double tolerance for every consumer here.
inline constexpr double kTailRelativeCutoff = 1e-20;

/// Visits the span [a, b]. on_scattered(s, sigma_s, mu_s) is called once for
/// every right-scattered s in [a, b), in ascending order except inside
/// descents from an accumulation point, where the largest points come first.
/// on_dense(x0, x1) is called for maximal dense stretches [x0, x1].
template <typename ScatteredFn, typename DenseFn>
void walk_delta(const TimeScale& ts, const Point& a, const Point& b, ScatteredFn&& on_scattered,
                DenseFn&& on_dense) {
    ts.require(a);
    ts.require(b);
    if (b < a) throw ValidationError("span requires a <= b");

    Point cur = a;
    while (cur < b) {
        const Point s = sigma(ts, cur);
        if (s != cur) {
            on_scattered(cur, s, mu(ts, cur));
            cur = s;
            continue;
        }

        // cur is right-dense: the points just above it live either in an
        // interval or accumulate geometrically.
        const Segment& own = ts.segments()[static_cast<std::size_t>(cur.segment())];
        std::int32_t aseg = cur.segment();
        bool in_own_segment = false;
        if (cur.kind() == Point::Kind::Dense) {
            const auto& iv = std::get<RealInterval>(own);
            in_own_segment = cur.value() < iv.hi;
        } else if (cur.kind() == Point::Kind::Zero) {
            in_own_segment = !std::get<GeometricGrid>(own).negative;
        }
        if (!in_own_segment) aseg = cur.segment() + 1;
        if (static_cast<std::size_t>(aseg) >= ts.segments().size())
            throw ValidationError("walk ran past the last segment"); // unreachable for b in T

        const Segment& above = ts.segments()[static_cast<std::size_t>(aseg)];

        if (const auto* iv = std::get_if<RealInterval>(&above)) {
            const bool b_inside = b.segment() == aseg && b.kind() == Point::Kind::Dense;
            const double x1 = b_inside ? b.value() : iv->hi;
            on_dense(cur.value(), x1);
            cur = b_inside ? b : ts.at(iv->hi, 0.0);
            continue;
        }

        const auto& gg = std::get<GeometricGrid>(above);
        if (gg.negative || gg.lo_exponent)
            throw ValidationError("walk stalled at a right-dense point"); // unreachable

        // Descent piece: enumerate sign q^k for k below k_stop, largest first,
        // until the tail is negligible relative to the piece top.
        std::int64_t k_stop;
        Point stop = cur;
        if (b.segment() == aseg && b.kind() == Point::Kind::Grid) {
            k_stop = b.grid_index();
            stop = b;
        } else {
            if (!gg.hi_exponent)
                throw ValidationError("walk target beyond an unbounded segment"); // unreachable
            k_stop = *gg.hi_exponent;
            stop = ts.grid_point(aseg, k_stop);
        }
        const double top = std::pow(gg.ratio, static_cast<double>(k_stop));
        const double cutoff = std::max(top, 1.0) * kTailRelativeCutoff;
        for (std::int64_t k = k_stop - 1;; --k) {
            const double val = std::pow(gg.ratio, static_cast<double>(k));
            if (val < cutoff || val < 1e-300) break;
            on_scattered(ts.grid_point(aseg, k), ts.grid_point(aseg, k + 1),
                         (gg.ratio - 1.0) * val);
        }
        cur = stop;
    }
}

} // namespace tscalc::detail
