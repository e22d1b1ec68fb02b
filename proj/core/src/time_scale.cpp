#include "tscalc/time_scale.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "tscalc/format.hpp"

namespace tscalc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kZeroRankLow = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kZeroRankHigh = std::numeric_limits<std::int64_t>::max();

double geo_value(const GeometricGrid& g, std::int64_t exponent) {
    const double mag = std::pow(g.ratio, static_cast<double>(exponent));
    return g.negative ? -mag : mag;
}

std::string describe(double x) { return format_real(x); }

} // namespace

std::string format_real(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0"; // also maps -0.0 to "0"
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

double segment_lo(const Segment& s) {
    if (const auto* iv = std::get_if<RealInterval>(&s)) return iv->lo;
    if (const auto* ug = std::get_if<UniformGrid>(&s)) {
        if (!ug->lo_index) return -kInf;
        return ug->origin + static_cast<double>(*ug->lo_index) * ug->step;
    }
    const auto& gg = std::get<GeometricGrid>(s);
    if (!gg.negative) return gg.lo_exponent ? geo_value(gg, *gg.lo_exponent) : 0.0;
    return gg.hi_exponent ? geo_value(gg, *gg.hi_exponent) : -kInf;
}

double segment_hi(const Segment& s) {
    if (const auto* iv = std::get_if<RealInterval>(&s)) return iv->hi;
    if (const auto* ug = std::get_if<UniformGrid>(&s)) {
        if (!ug->hi_index) return kInf;
        return ug->origin + static_cast<double>(*ug->hi_index) * ug->step;
    }
    const auto& gg = std::get<GeometricGrid>(s);
    if (!gg.negative) return gg.hi_exponent ? geo_value(gg, *gg.hi_exponent) : kInf;
    return gg.lo_exponent ? geo_value(gg, *gg.lo_exponent) : 0.0;
}

namespace {

bool bounded_below_seg(const Segment& s) { return std::isfinite(segment_lo(s)); }
bool bounded_above_seg(const Segment& s) { return std::isfinite(segment_hi(s)); }

void validate_segment(const Segment& s, std::size_t i) {
    auto fail = [&](const std::string& what) {
        throw ValidationError("segment " + std::to_string(i) + ": " + what);
    };
    if (const auto* iv = std::get_if<RealInterval>(&s)) {
        if (std::isnan(iv->lo) || std::isnan(iv->hi)) fail("interval bound is NaN");
        if (!(iv->lo < iv->hi)) fail("interval requires lo < hi");
        return;
    }
    if (const auto* ug = std::get_if<UniformGrid>(&s)) {
        if (!(ug->step > 0.0) || !std::isfinite(ug->step)) fail("grid step must be positive");
        if (!std::isfinite(ug->origin)) fail("grid origin must be finite");
        if (ug->lo_index && ug->hi_index && !(*ug->lo_index < *ug->hi_index))
            fail("grid needs at least two points (lo_index < hi_index)");
        return;
    }
    const auto& gg = std::get<GeometricGrid>(s);
    if (!(gg.ratio > 1.0) || !std::isfinite(gg.ratio)) fail("geometric ratio must be > 1");
    if (gg.lo_exponent && gg.hi_exponent && !(*gg.lo_exponent < *gg.hi_exponent))
        fail("geometric grid needs at least two points (lo_exponent < hi_exponent)");
}

} // namespace

TimeScale::TimeScale(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw ValidationError("time scale needs at least one segment");
    for (std::size_t i = 0; i < segments_.size(); ++i) validate_segment(segments_[i], i);

    for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
        const double hi = segment_hi(segments_[i]);
        const double lo = segment_lo(segments_[i + 1]);
        if (!std::isfinite(hi))
            throw ValidationError("segment " + std::to_string(i) +
                                  " is unbounded above but is not the last segment");
        if (!std::isfinite(lo))
            throw ValidationError("segment " + std::to_string(i + 1) +
                                  " is unbounded below but is not the first segment");
        if (hi < lo)
            throw ValidationError("gap between segments " + std::to_string(i) + " and " +
                                  std::to_string(i + 1) + " (" + describe(hi) + " < " +
                                  describe(lo) + "): the union is not a regular time scale");
        if (hi > lo)
            throw ValidationError("segments " + std::to_string(i) + " and " +
                                  std::to_string(i + 1) + " overlap near " + describe(lo));
        if (std::holds_alternative<RealInterval>(segments_[i]) &&
            std::holds_alternative<RealInterval>(segments_[i + 1]))
            throw ValidationError("segments " + std::to_string(i) + " and " +
                                  std::to_string(i + 1) + " meet dense-to-dense at " +
                                  describe(hi) + "; no side approaches the junction through "
                                  "scattered points, merge them into one interval");
    }
}

TimeScale TimeScale::reals() { return TimeScale({RealInterval{-kInf, kInf}}); }

TimeScale TimeScale::real_interval(double lo, double hi) {
    return TimeScale({RealInterval{lo, hi}});
}

TimeScale TimeScale::uniform_lattice(double step, double origin) {
    return TimeScale({UniformGrid{step, origin, std::nullopt, std::nullopt}});
}

TimeScale TimeScale::q_closure(double q, bool negative) {
    return TimeScale({GeometricGrid{q, negative, std::nullopt, std::nullopt}});
}

TimeScale TimeScale::q_symmetric(double q) {
    return TimeScale({GeometricGrid{q, true, std::nullopt, std::nullopt},
                      GeometricGrid{q, false, std::nullopt, std::nullopt}});
}

bool TimeScale::bounded_below() const { return std::isfinite(inf_value()); }
bool TimeScale::bounded_above() const { return std::isfinite(sup_value()); }

Point TimeScale::make_dense(std::int32_t seg, double x) const {
    return Point(seg, Point::Kind::Dense, 0, 0, x);
}

Point TimeScale::make_grid(std::int32_t seg, std::int64_t idx) const {
    const Segment& s = segments_[static_cast<std::size_t>(seg)];
    if (const auto* ug = std::get_if<UniformGrid>(&s)) {
        const double val = ug->origin + static_cast<double>(idx) * ug->step;
        return Point(seg, Point::Kind::Grid, idx, idx, val);
    }
    const auto& gg = std::get<GeometricGrid>(s);
    const std::int64_t rank = gg.negative ? -idx : idx;
    return Point(seg, Point::Kind::Grid, idx, rank, geo_value(gg, idx));
}

Point TimeScale::make_zero(std::int32_t seg) const {
    const auto& gg = std::get<GeometricGrid>(segments_[static_cast<std::size_t>(seg)]);
    return Point(seg, Point::Kind::Zero, 0, gg.negative ? kZeroRankHigh : kZeroRankLow, 0.0);
}

Point TimeScale::max_rep(std::int32_t seg) const {
    const Segment& s = segments_[static_cast<std::size_t>(seg)];
    if (const auto* iv = std::get_if<RealInterval>(&s)) return make_dense(seg, iv->hi);
    if (const auto* ug = std::get_if<UniformGrid>(&s)) return make_grid(seg, *ug->hi_index);
    const auto& gg = std::get<GeometricGrid>(s);
    if (!gg.negative) return make_grid(seg, *gg.hi_exponent);
    return gg.lo_exponent ? make_grid(seg, *gg.lo_exponent) : make_zero(seg);
}

bool TimeScale::is_max_rep(const Point& p) const {
    const Segment& s = segments_[static_cast<std::size_t>(p.segment())];
    if (!bounded_above_seg(s)) return false;
    return p == max_rep(p.segment());
}

bool TimeScale::is_min_rep(const Point& p) const {
    const Segment& s = segments_[static_cast<std::size_t>(p.segment())];
    if (!bounded_below_seg(s)) return false;
    if (const auto* iv = std::get_if<RealInterval>(&s))
        return p.kind() == Point::Kind::Dense && p.value() == iv->lo;
    if (const auto* ug = std::get_if<UniformGrid>(&s))
        return p.kind() == Point::Kind::Grid && p.grid_index() == *ug->lo_index;
    const auto& gg = std::get<GeometricGrid>(s);
    if (!gg.negative)
        return gg.lo_exponent ? (p.kind() == Point::Kind::Grid && p.grid_index() == *gg.lo_exponent)
                              : p.kind() == Point::Kind::Zero;
    return p.kind() == Point::Kind::Grid && p.grid_index() == *gg.hi_exponent;
}

Point TimeScale::grid_point(std::int32_t seg, std::int64_t index) const {
    if (seg < 0 || static_cast<std::size_t>(seg) >= segments_.size())
        throw ValidationError("segment index out of range");
    const Segment& s = segments_[static_cast<std::size_t>(seg)];
    if (std::holds_alternative<RealInterval>(s))
        throw ValidationError("dense segment has no grid points");
    if (const auto* ug = std::get_if<UniformGrid>(&s)) {
        if ((ug->lo_index && index < *ug->lo_index) || (ug->hi_index && index > *ug->hi_index))
            throw ValidationError("grid index out of segment bounds");
    } else {
        const auto& gg = std::get<GeometricGrid>(s);
        if ((gg.lo_exponent && index < *gg.lo_exponent) ||
            (gg.hi_exponent && index > *gg.hi_exponent))
            throw ValidationError("geometric exponent out of segment bounds");
    }
    Point p = make_grid(seg, index);
    if (seg > 0 && is_min_rep(p)) return max_rep(seg - 1); // junction owned below
    return p;
}

Point TimeScale::zero_point(std::int32_t seg) const {
    if (seg < 0 || static_cast<std::size_t>(seg) >= segments_.size())
        throw ValidationError("segment index out of range");
    const auto* gg = std::get_if<GeometricGrid>(&segments_[static_cast<std::size_t>(seg)]);
    if (!gg || gg->lo_exponent)
        throw ValidationError("segment has no accumulation point 0");
    Point p = make_zero(seg);
    if (seg > 0 && is_min_rep(p)) return max_rep(seg - 1);
    return p;
}

Point TimeScale::dense_point(std::int32_t seg, double x) const {
    if (seg < 0 || static_cast<std::size_t>(seg) >= segments_.size())
        throw ValidationError("segment index out of range");
    const auto* iv = std::get_if<RealInterval>(&segments_[static_cast<std::size_t>(seg)]);
    if (!iv) throw ValidationError("segment is not an interval");
    if (!(x >= iv->lo && x <= iv->hi))
        throw ValidationError("coordinate " + describe(x) + " outside interval segment");
    Point p = make_dense(seg, x);
    if (seg > 0 && is_min_rep(p)) return max_rep(seg - 1);
    return p;
}

Point TimeScale::min_point() const {
    if (!bounded_below()) throw ValidationError("time scale is unbounded below");
    const Segment& s = segments_.front();
    if (const auto* iv = std::get_if<RealInterval>(&s)) return make_dense(0, iv->lo);
    if (const auto* ug = std::get_if<UniformGrid>(&s)) return make_grid(0, *ug->lo_index);
    const auto& gg = std::get<GeometricGrid>(s);
    if (!gg.negative) return gg.lo_exponent ? make_grid(0, *gg.lo_exponent) : make_zero(0);
    return make_grid(0, *gg.hi_exponent);
}

Point TimeScale::max_point() const {
    if (!bounded_above()) throw ValidationError("time scale is unbounded above");
    return max_rep(static_cast<std::int32_t>(segments_.size()) - 1);
}

std::optional<Point> TimeScale::find(double x, double rel_tol) const {
    if (std::isnan(x)) return std::nullopt;
    const double slack = rel_tol * std::max(1.0, std::abs(x));
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto seg = static_cast<std::int32_t>(i);
        const Segment& s = segments_[i];
        const double lo = segment_lo(s);
        const double hi = segment_hi(s);
        if (x > hi + slack) continue;
        if (x < lo - slack) return std::nullopt; // segments are ordered
        if (const auto* iv = std::get_if<RealInterval>(&s)) {
            const double clamped = std::clamp(x, iv->lo, iv->hi);
            Point p = make_dense(seg, clamped);
            return (i > 0 && is_min_rep(p)) ? max_rep(seg - 1) : p;
        }
        if (const auto* ug = std::get_if<UniformGrid>(&s)) {
            const double k = std::round((x - ug->origin) / ug->step);
            const auto idx = static_cast<std::int64_t>(k);
            if ((ug->lo_index && idx < *ug->lo_index) || (ug->hi_index && idx > *ug->hi_index))
                continue;
            const double val = ug->origin + k * ug->step;
            if (std::abs(val - x) > slack) continue;
            Point p = make_grid(seg, idx);
            return (i > 0 && is_min_rep(p)) ? max_rep(seg - 1) : p;
        }
        const auto& gg = std::get<GeometricGrid>(s);
        if (std::abs(x) <= slack && !gg.lo_exponent) {
            Point p = make_zero(seg);
            return (i > 0 && is_min_rep(p)) ? max_rep(seg - 1) : p;
        }
        if ((gg.negative && x >= 0) || (!gg.negative && x <= 0)) continue;
        const double guess = std::log(std::abs(x)) / std::log(gg.ratio);
        for (std::int64_t k = static_cast<std::int64_t>(std::floor(guess)) - 1;
             k <= static_cast<std::int64_t>(std::ceil(guess)) + 1; ++k) {
            if ((gg.lo_exponent && k < *gg.lo_exponent) || (gg.hi_exponent && k > *gg.hi_exponent))
                continue;
            if (std::abs(geo_value(gg, k) - x) <= slack) {
                Point p = make_grid(seg, k);
                return (i > 0 && is_min_rep(p)) ? max_rep(seg - 1) : p;
            }
        }
    }
    return std::nullopt;
}

Point TimeScale::at(double x, double rel_tol) const {
    auto p = find(x, rel_tol);
    if (!p) throw ValidationError("point " + describe(x) + " is not in the time scale");
    return *p;
}

bool TimeScale::contains(const Point& p) const {
    if (p.segment() < 0 || static_cast<std::size_t>(p.segment()) >= segments_.size())
        return false;
    const Segment& s = segments_[static_cast<std::size_t>(p.segment())];
    if (const auto* iv = std::get_if<RealInterval>(&s)) {
        if (p.kind() != Point::Kind::Dense) return false;
        if (!(p.value() >= iv->lo && p.value() <= iv->hi)) return false;
    } else if (const auto* ug = std::get_if<UniformGrid>(&s)) {
        if (p.kind() != Point::Kind::Grid) return false;
        if ((ug->lo_index && p.grid_index() < *ug->lo_index) ||
            (ug->hi_index && p.grid_index() > *ug->hi_index))
            return false;
    } else {
        const auto& gg = std::get<GeometricGrid>(s);
        if (p.kind() == Point::Kind::Zero) {
            if (gg.lo_exponent) return false;
        } else if (p.kind() == Point::Kind::Grid) {
            if ((gg.lo_exponent && p.grid_index() < *gg.lo_exponent) ||
                (gg.hi_exponent && p.grid_index() > *gg.hi_exponent))
                return false;
        } else {
            return false;
        }
    }
    // Canonical ownership: a junction must not be addressed as the upper
    // segment's minimum.
    if (p.segment() > 0 && is_min_rep(p)) return false;
    return true;
}

void TimeScale::require(const Point& p) const {
    if (!contains(p))
        throw ValidationError("point " + describe(p.value()) + " is not in the time scale");
}

// ---------------------------------------------------------------------------
// Jump operators
// ---------------------------------------------------------------------------

Point sigma(const TimeScale& ts, const Point& t) {
    ts.require(t);
    const auto seg = t.segment();
    const Segment& s = ts.segments_[static_cast<std::size_t>(seg)];

    if (!ts.is_max_rep(t)) {
        if (std::holds_alternative<RealInterval>(s)) return t; // right-dense interior
        if (std::holds_alternative<UniformGrid>(s)) return ts.make_grid(seg, t.grid_index() + 1);
        const auto& gg = std::get<GeometricGrid>(s);
        if (t.kind() == Point::Kind::Zero) return t; // right-dense accumulation minimum
        return ts.make_grid(seg, t.grid_index() + (gg.negative ? -1 : +1));
    }

    // t is the top of its segment: either sup T or a junction.
    if (static_cast<std::size_t>(seg) + 1 == ts.segments_.size()) return t; // sigma(sup T) = sup T
    const std::int32_t up = seg + 1;
    const Segment& next = ts.segments_[static_cast<std::size_t>(up)];
    if (std::holds_alternative<RealInterval>(next)) return t; // dense above the junction
    if (const auto* ug = std::get_if<UniformGrid>(&next)) return ts.make_grid(up, *ug->lo_index + 1);
    const auto& gg = std::get<GeometricGrid>(next);
    if (!gg.negative) {
        if (!gg.lo_exponent) return t; // geometric accumulation above the junction
        return ts.make_grid(up, *gg.lo_exponent + 1);
    }
    return ts.make_grid(up, *gg.hi_exponent - 1);
}

Point rho(const TimeScale& ts, const Point& t) {
    ts.require(t);
    const auto seg = t.segment();
    const Segment& s = ts.segments_[static_cast<std::size_t>(seg)];

    if (ts.is_min_rep(t)) return t; // canonical min-rep implies seg == 0: rho(inf T) = inf T

    if (const auto* iv = std::get_if<RealInterval>(&s)) {
        (void)iv;
        return t; // left-dense everywhere above the interval's lo
    }
    if (std::holds_alternative<UniformGrid>(s)) {
        Point p = ts.make_grid(seg, t.grid_index() - 1);
        return (seg > 0 && ts.is_min_rep(p)) ? ts.max_rep(seg - 1) : p;
    }
    const auto& gg = std::get<GeometricGrid>(s);
    if (t.kind() == Point::Kind::Zero) return t; // left-dense accumulation maximum
    Point p = ts.make_grid(seg, t.grid_index() + (gg.negative ? +1 : -1));
    return (seg > 0 && ts.is_min_rep(p)) ? ts.max_rep(seg - 1) : p;
}

double mu(const TimeScale& ts, const Point& t) {
    const Point s = sigma(ts, t);
    if (s == t) return 0.0;
    if (s.segment() == t.segment() && t.kind() == Point::Kind::Grid) {
        const Segment& seg = ts.segments()[static_cast<std::size_t>(t.segment())];
        if (const auto* ug = std::get_if<UniformGrid>(&seg)) return ug->step;
        const auto& gg = std::get<GeometricGrid>(seg);
        // (q - 1) q^k for q^k, (q - 1) q^(k-1) for -q^k
        const std::int64_t e = gg.negative ? t.grid_index() - 1 : t.grid_index();
        return (gg.ratio - 1.0) * std::pow(gg.ratio, static_cast<double>(e));
    }
    return s.value() - t.value(); // junction crossing
}

double nu(const TimeScale& ts, const Point& t) {
    const Point r = rho(ts, t);
    if (r == t) return 0.0;
    if (r.segment() == t.segment() && t.kind() == Point::Kind::Grid) {
        const Segment& seg = ts.segments()[static_cast<std::size_t>(t.segment())];
        if (const auto* ug = std::get_if<UniformGrid>(&seg)) return ug->step;
        const auto& gg = std::get<GeometricGrid>(seg);
        const std::int64_t e = gg.negative ? t.grid_index() : t.grid_index() - 1;
        return (gg.ratio - 1.0) * std::pow(gg.ratio, static_cast<double>(e));
    }
    return t.value() - r.value();
}

PointClass classify(const TimeScale& ts, const Point& t) {
    PointClass c;
    c.right = (sigma(ts, t) == t) ? PointClass::Side::Dense : PointClass::Side::Scattered;
    c.left = (rho(ts, t) == t) ? PointClass::Side::Dense : PointClass::Side::Scattered;
    c.is_min = ts.bounded_below() && t == ts.min_point();
    c.is_max = ts.bounded_above() && t == ts.max_point();
    return c;
}

RegularityReport is_regular(const TimeScale& ts) {
    auto violation = [](const Point& p, std::string why) {
        RegularityReport r;
        r.regular = false;
        r.witness = p;
        r.reason = std::move(why);
        return r;
    };

    if (ts.bounded_below()) {
        const Point m = ts.min_point();
        if (sigma(ts, m) != m)
            return violation(m, "minimum " + describe(m.value()) + " is right-scattered");
    }
    if (ts.bounded_above()) {
        const Point m = ts.max_point();
        if (rho(ts, m) != m)
            return violation(m, "maximum " + describe(m.value()) + " is left-scattered");
    }
    for (std::size_t i = 0; i + 1 < ts.segments().size(); ++i) {
        // Junction points are the only candidates for a mixed classification.
        const Point j = ts.at(segment_hi(ts.segments()[i]), 0.0);
        const PointClass c = classify(ts, j);
        if (!c.two_sided_dense() && !c.two_sided_scattered())
            return violation(j, "junction " + describe(j.value()) +
                                    " is neither two-sided dense nor two-sided scattered");
    }
    return {};
}

Partition atomic_partition(const TimeScale& ts) {
    const RegularityReport reg = is_regular(ts);
    if (!reg) throw ValidationError("atomic partition requires a regular time scale: " + reg.reason);

    Partition out;
    std::vector<Segment> run;
    for (std::size_t i = 0; i < ts.segments().size(); ++i) {
        run.push_back(ts.segments()[i]);
        if (i + 1 == ts.segments().size()) break;
        const Point j = ts.at(segment_hi(ts.segments()[i]), 0.0);
        if (classify(ts, j).two_sided_dense()) {
            // Switching point: both sides reach the junction as a limit, so
            // neither piece can absorb the other.
            out.atoms.emplace_back(run);
            out.switching_points.push_back(j);
            run.clear();
        }
    }
    out.atoms.emplace_back(run);
    return out;
}

std::vector<Point> iterate_scattered(const TimeScale& ts, const Point& from, const Point& to) {
    ts.require(from);
    ts.require(to);
    if (to < from) throw ValidationError("iterate_scattered requires from <= to");
    std::vector<Point> chain;
    Point cur = from;
    while (cur < to) {
        // A sigma-chain never escapes a downward-unbounded negative geometric
        // lattice: it only approaches the accumulation point 0. Detect the
        // unreachable target instead of looping forever.
        if (cur.kind() == Point::Kind::Grid) {
            const auto* gg =
                std::get_if<GeometricGrid>(&ts.segments()[static_cast<std::size_t>(cur.segment())]);
            if (gg && gg->negative && !gg->lo_exponent &&
                (to.segment() != cur.segment() || to.kind() != Point::Kind::Grid))
                throw ValidationError("span contains the accumulation point 0");
        }
        const Point next = sigma(ts, cur);
        if (next == cur)
            throw ValidationError("span contains a dense point at " + describe(cur.value()));
        chain.push_back(cur);
        cur = next;
    }
    return chain;
}

// ---------------------------------------------------------------------------
// Canonical clause text
// ---------------------------------------------------------------------------

namespace {

std::string bound_to_string(const std::optional<std::int64_t>& b) {
    return b ? std::to_string(*b) : std::string("?");
}

std::string segment_to_string(const Segment& s) {
    std::ostringstream os;
    if (const auto* iv = std::get_if<RealInterval>(&s)) {
        os << "interval(" << format_real(iv->lo) << "," << format_real(iv->hi) << ")";
        return os.str();
    }
    if (const auto* ug = std::get_if<UniformGrid>(&s)) {
        const double lo = segment_lo(s);
        const double hi = segment_hi(s);
        os << "grid(" << format_real(ug->step) << "," << format_real(lo) << ","
           << format_real(hi);
        if (!ug->lo_index && !ug->hi_index && ug->origin != 0.0)
            os << ",origin=" << format_real(ug->origin);
        os << ")";
        return os.str();
    }
    const auto& gg = std::get<GeometricGrid>(s);
    os << "qgrid(" << format_real(gg.ratio) << "," << (gg.negative ? "-" : "+");
    if (gg.lo_exponent) os << ",kmin=" << bound_to_string(gg.lo_exponent);
    if (gg.hi_exponent) os << ",kmax=" << bound_to_string(gg.hi_exponent);
    os << ")";
    return os.str();
}

} // namespace

std::string TimeScale::to_spec_string() const {
    std::string out;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (i) out += "; ";
        out += segment_to_string(segments_[i]);
    }
    return out;
}

} // namespace tscalc
