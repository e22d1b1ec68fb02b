#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tscalc/errors.hpp"

namespace tscalc {

// ---------------------------------------------------------------------------
// Segments
//
// A time scale is stored as an ordered list of atomic building blocks.
// Consecutive segments share exactly one real point (the junction), which
// canonically belongs to the lower-indexed segment.
// ---------------------------------------------------------------------------

/// A closed real interval [lo, hi], lo < hi. Either endpoint may be infinite.
struct RealInterval {
    double lo = 0.0;
    double hi = 1.0;
};

/// The lattice {origin + k*step : lo_index <= k <= hi_index}.
/// An absent index bound means the lattice is unbounded on that side.
struct UniformGrid {
    double step = 1.0;
    double origin = 0.0;
    std::optional<std::int64_t> lo_index;
    std::optional<std::int64_t> hi_index;
};

/// The closure of a one-sided geometric lattice with ratio q > 1.
///
/// Points are sign * q^k for exponents k in [lo_exponent, hi_exponent].
/// When lo_exponent is absent the exponents extend to -infinity and the
/// accumulation point 0 belongs to the segment (it is then the segment
/// minimum for the positive orientation and the maximum for the negative
/// one). Zero is present exactly in that case: a geometric lattice with a
/// smallest exponent is closed without it.
struct GeometricGrid {
    double ratio = 2.0;
    bool negative = false;
    std::optional<std::int64_t> lo_exponent;
    std::optional<std::int64_t> hi_exponent;
};

using Segment = std::variant<RealInterval, UniformGrid, GeometricGrid>;

/// Infimum of the segment as a real number (-inf when unbounded below).
double segment_lo(const Segment& s);
/// Supremum of the segment (+inf when unbounded above).
double segment_hi(const Segment& s);

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

/// A point of a time scale, addressed structurally so that jump operators
/// and point equality are exact: grid points carry their integer index, the
/// geometric accumulation point carries a dedicated tag, and only points of
/// dense segments are addressed by a real coordinate.
class Point {
public:
    enum class Kind : std::uint8_t {
        Dense, ///< real coordinate in a RealInterval segment
        Grid,  ///< uniform index or geometric exponent
        Zero,  ///< accumulation point 0 of a GeometricGrid segment
    };

    std::int32_t segment() const { return seg_; }
    Kind kind() const { return kind_; }

    /// Real value of the point. Derived; never used for ordering grid points.
    double value() const { return val_; }

    /// Lattice index (UniformGrid) or exponent (GeometricGrid). Grid only.
    std::int64_t grid_index() const { return idx_; }

    friend bool operator==(const Point& a, const Point& b) {
        if (a.seg_ != b.seg_ || a.kind_ != b.kind_) return false;
        if (a.kind_ == Kind::Dense) return a.val_ == b.val_;
        return a.rank_ == b.rank_;
    }
    friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
    friend bool operator<(const Point& a, const Point& b) {
        if (a.seg_ != b.seg_) return a.seg_ < b.seg_;
        if (a.kind_ == Kind::Dense && b.kind_ == Kind::Dense) return a.val_ < b.val_;
        return a.rank_ < b.rank_;
    }
    friend bool operator<=(const Point& a, const Point& b) { return a < b || a == b; }
    friend bool operator>(const Point& a, const Point& b) { return b < a; }
    friend bool operator>=(const Point& a, const Point& b) { return b <= a; }

private:
    friend class TimeScale;
    Point(std::int32_t seg, Kind kind, std::int64_t idx, std::int64_t rank, double val)
        : seg_(seg), kind_(kind), idx_(idx), rank_(rank), val_(val) {}

    std::int32_t seg_;
    Kind kind_;
    std::int64_t idx_;  // meaningful for Kind::Grid
    std::int64_t rank_; // monotone within a segment; sentinels for Zero
    double val_;
};

/// Two-sided classification of a point plus boundary flags.
struct PointClass {
    enum class Side : std::uint8_t { Dense, Scattered };
    Side left = Side::Dense;
    Side right = Side::Dense;
    bool is_min = false;
    bool is_max = false;

    bool two_sided_dense() const { return left == Side::Dense && right == Side::Dense; }
    bool two_sided_scattered() const {
        return left == Side::Scattered && right == Side::Scattered;
    }
};

// ---------------------------------------------------------------------------
// TimeScale
// ---------------------------------------------------------------------------

/// An ordered union of segments forming a closed subset of the reals.
///
/// Construction validates segment parameters, strict ordering, adjacency
/// (consecutive segments share exactly one point) and rejects junctions with
/// dense approach on both sides, which would merely be a mis-specified
/// single interval. Instances are immutable afterwards; all operations are
/// safe for concurrent readers.
class TimeScale {
public:
    explicit TimeScale(std::vector<Segment> segments);

    static TimeScale reals();
    static TimeScale real_interval(double lo, double hi);
    /// The lattice step*Z (+ origin), unbounded both ways.
    static TimeScale uniform_lattice(double step, double origin = 0.0);
    static TimeScale integers() { return uniform_lattice(1.0); }
    /// Closure of q^Z (positive) or -q^Z (negative), including 0.
    static TimeScale q_closure(double q, bool negative = false);
    /// Q_q = closure(-q^Z) followed by closure(q^Z), glued at 0.
    static TimeScale q_symmetric(double q);

    const std::vector<Segment>& segments() const { return segments_; }
    std::size_t segment_count() const { return segments_.size(); }

    bool bounded_below() const;
    bool bounded_above() const;
    double inf_value() const { return segment_lo(segments_.front()); }
    double sup_value() const { return segment_hi(segments_.back()); }

    /// Smallest point; requires bounded_below().
    Point min_point() const;
    /// Largest point; requires bounded_above().
    Point max_point() const;

    /// Locate a real number in the time scale. rel_tol allows grid snapping
    /// (|x - candidate| <= rel_tol * max(1, |x|)); rel_tol 0 demands equality.
    std::optional<Point> find(double x, double rel_tol = 0.0) const;
    /// Locating variant that throws ValidationError when x is not in T.
    Point at(double x, double rel_tol = 1e-9) const;

    /// Structural membership check (segment range, kind, bounds, value).
    bool contains(const Point& p) const;
    /// Throws ValidationError when the point does not belong to this scale.
    void require(const Point& p) const;

    /// Canonical grid point of segment `seg` (uniform index or geometric
    /// exponent). Junction representations are normalized downward.
    Point grid_point(std::int32_t seg, std::int64_t index) const;
    /// Canonical point for the accumulation point 0 of geometric segment `seg`.
    Point zero_point(std::int32_t seg) const;
    /// Canonical point with real coordinate x inside interval segment `seg`.
    Point dense_point(std::int32_t seg, double x) const;

    /// Canonical clause text, e.g. "interval(-1,0); qgrid(2,+)".
    std::string to_spec_string() const;

private:
    friend Point sigma(const TimeScale&, const Point&);
    friend Point rho(const TimeScale&, const Point&);

    Point make_dense(std::int32_t seg, double x) const;
    Point make_grid(std::int32_t seg, std::int64_t idx) const;
    Point make_zero(std::int32_t seg) const;
    Point max_rep(std::int32_t seg) const; // junction/maximum representation
    bool is_max_rep(const Point& p) const;
    bool is_min_rep(const Point& p) const;

    std::vector<Segment> segments_;
};

// ---------------------------------------------------------------------------
// Jump operators and classification
// ---------------------------------------------------------------------------

/// Forward jump sigma(t) = inf{s in T : s > t}; sigma(sup T) = sup T.
Point sigma(const TimeScale& ts, const Point& t);
/// Backward jump rho(t) = sup{s in T : s < t}; rho(inf T) = inf T.
Point rho(const TimeScale& ts, const Point& t);
/// Forward graininess mu(t) = sigma(t) - t, computed without cancellation
/// on grid interiors.
double mu(const TimeScale& ts, const Point& t);
/// Backward graininess nu(t) = t - rho(t).
double nu(const TimeScale& ts, const Point& t);

PointClass classify(const TimeScale& ts, const Point& t);

/// Verdict of the regularity test, naming the first violating point.
struct RegularityReport {
    bool regular = true;
    std::optional<Point> witness;
    std::string reason;

    explicit operator bool() const { return regular; }
};

/// A time scale is regular when sigma(rho(t)) = rho(sigma(t)) = t on all of
/// T; equivalently, the minimum (when it exists) is right-dense, the maximum
/// is left-dense, and every interior point is two-sided dense or two-sided
/// scattered.
RegularityReport is_regular(const TimeScale& ts);

/// Result of the unique decomposition into atomic time scales.
struct Partition {
    std::vector<TimeScale> atoms;
    std::vector<Point> switching_points; // points of the parent scale
};

/// Unique ordered partition of a regular time scale into atomic pieces.
/// Consecutive atoms intersect exactly in their switching point.
/// Throws ValidationError when the scale is not regular.
Partition atomic_partition(const TimeScale& ts);

/// The sigma-chain from `from` (inclusive) to rho(`to`) (inclusive).
/// Requires from <= to and a purely scattered open span; returns an empty
/// sequence when from == to.
std::vector<Point> iterate_scattered(const TimeScale& ts, const Point& from,
                                     const Point& to);

} // namespace tscalc
