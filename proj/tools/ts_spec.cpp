#include "ts_spec.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

#include "expr.hpp"
#include "tscalc/format.hpp"

namespace tscalc::cli {

namespace {

struct Arg {
    std::string name; // empty for positional
    std::string value;
    std::size_t offset;
};

struct Clause {
    std::string name;
    std::vector<Arg> args;
    std::size_t offset;
};

class ClauseLexer {
public:
    explicit ClauseLexer(std::string_view text) : text_(text) {}

    std::vector<Clause> parse_all() {
        std::vector<Clause> clauses;
        skip_ws();
        while (pos_ < text_.size()) {
            clauses.push_back(clause());
            skip_ws();
            if (pos_ < text_.size()) {
                if (text_[pos_] != ';')
                    throw ParseError("expected ';' between time-scale clauses", pos_);
                ++pos_;
                skip_ws();
            }
        }
        if (clauses.empty()) throw ParseError("empty time-scale spec", 0);
        return clauses;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string ident() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (pos_ == start) throw ParseError("expected a clause name", start);
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string value_token() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ')' &&
               text_[pos_] != '=' &&
               !std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ == start) throw ParseError("expected an argument value", start);
        return std::string(text_.substr(start, pos_ - start));
    }

    Clause clause() {
        Clause c;
        c.offset = pos_;
        c.name = ident();
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '(')
            throw ParseError("expected '(' after clause name '" + c.name + "'", pos_);
        ++pos_;
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ')') {
            ++pos_;
            return c;
        }
        while (true) {
            Arg a;
            a.offset = pos_;
            a.value = value_token();
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '=') {
                ++pos_;
                a.name = a.value;
                a.value = value_token();
                skip_ws();
            }
            c.args.push_back(std::move(a));
            if (pos_ >= text_.size()) throw ParseError("unterminated clause argument list", pos_);
            if (text_[pos_] == ',') {
                ++pos_;
                continue;
            }
            if (text_[pos_] == ')') {
                ++pos_;
                return c;
            }
            throw ParseError("expected ',' or ')' in clause arguments", pos_);
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

double parse_real(const Arg& a) {
    if (a.value == "inf" || a.value == "+inf") return std::numeric_limits<double>::infinity();
    if (a.value == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* begin = a.value.data();
    const char* end = begin + a.value.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ParseError("malformed number '" + a.value + "'", a.offset);
    return v;
}

std::int64_t parse_int(const Arg& a) {
    std::int64_t v = 0;
    const char* begin = a.value.data();
    const char* end = begin + a.value.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ParseError("malformed integer '" + a.value + "'", a.offset);
    return v;
}

/// Positional-or-named argument lookup; positional order follows `names`.
class ArgView {
public:
    ArgView(const Clause& c, std::vector<std::string> names) : clause_(c), names_(std::move(names)) {
        std::size_t positional = 0;
        for (const Arg& a : c.args) {
            std::string key = a.name;
            if (key.empty()) {
                if (positional >= names_.size())
                    throw ParseError("too many arguments for clause '" + c.name + "'", a.offset);
                key = names_[positional++];
            }
            bool known = false;
            for (const auto& n : names_) known |= (n == key);
            if (!known)
                throw ParseError("unknown argument '" + key + "' for clause '" + c.name + "'",
                                 a.offset);
            for (const auto& [k, unused] : found_)
                if (k == key)
                    throw ParseError("duplicate argument '" + key + "'", a.offset);
            found_.emplace_back(key, &a);
        }
    }

    const Arg* find(const std::string& name) const {
        for (const auto& [k, a] : found_)
            if (k == name) return a;
        return nullptr;
    }

    const Arg& require(const std::string& name) const {
        const Arg* a = find(name);
        if (!a)
            throw ParseError("clause '" + clause_.name + "' is missing argument '" + name + "'",
                             clause_.offset);
        return *a;
    }

private:
    const Clause& clause_;
    std::vector<std::string> names_;
    std::vector<std::pair<std::string, const Arg*>> found_;
};

RealInterval make_interval(const Clause& c) {
    ArgView args(c, {"lo", "hi"});
    return RealInterval{parse_real(args.require("lo")), parse_real(args.require("hi"))};
}

UniformGrid make_grid(const Clause& c) {
    ArgView args(c, {"step", "from", "to", "origin"});
    UniformGrid g;
    g.step = parse_real(args.require("step"));
    if (!(g.step > 0.0) || !std::isfinite(g.step))
        throw ValidationError("grid step must be positive and finite");
    const double from = parse_real(args.require("from"));
    const double to = parse_real(args.require("to"));
    if (from >= to) throw ValidationError("grid requires from < to");
    const Arg* origin = args.find("origin");
    if (std::isfinite(from)) {
        g.origin = from;
        g.lo_index = 0;
        if (origin) throw ValidationError("origin is only meaningful for a doubly unbounded grid");
    } else if (std::isfinite(to)) {
        g.origin = to;
        g.hi_index = 0;
        if (origin) throw ValidationError("origin is only meaningful for a doubly unbounded grid");
    } else {
        g.origin = origin ? parse_real(*origin) : 0.0;
    }
    if (std::isfinite(from) && std::isfinite(to)) {
        const double steps = (to - from) / g.step;
        const double rounded = std::round(steps);
        if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, std::abs(steps)))
            throw ValidationError("grid range " + format_real(from) + ".." + format_real(to) +
                                  " is not a whole number of steps of " + format_real(g.step));
        g.hi_index = static_cast<std::int64_t>(rounded);
    }
    return g;
}

GeometricGrid make_qgrid(const Clause& c) {
    ArgView args(c, {"q", "side", "kmin", "kmax"});
    GeometricGrid g;
    g.ratio = parse_real(args.require("q"));
    const std::string& side = args.require("side").value;
    if (side == "+" || side == "pos")
        g.negative = false;
    else if (side == "-" || side == "neg")
        g.negative = true;
    else
        throw ParseError("qgrid side must be '+' or '-'", args.require("side").offset);
    if (const Arg* kmin = args.find("kmin")) g.lo_exponent = parse_int(*kmin);
    if (const Arg* kmax = args.find("kmax")) g.hi_exponent = parse_int(*kmax);
    return g;
}

} // namespace

TimeScale parse_timescale(std::string_view text) {
    ClauseLexer lexer(text);
    std::vector<Segment> segments;
    for (const Clause& c : lexer.parse_all()) {
        if (c.name == "interval") {
            segments.emplace_back(make_interval(c));
        } else if (c.name == "grid") {
            segments.emplace_back(make_grid(c));
        } else if (c.name == "qgrid") {
            segments.emplace_back(make_qgrid(c));
        } else if (c.name == "qsym") {
            ArgView args(c, {"q"});
            const double q = parse_real(args.require("q"));
            segments.emplace_back(GeometricGrid{q, true, std::nullopt, std::nullopt});
            segments.emplace_back(GeometricGrid{q, false, std::nullopt, std::nullopt});
        } else {
            throw ParseError("unknown clause '" + c.name +
                                 "'; expected interval, grid, qgrid or qsym",
                             c.offset);
        }
    }
    return TimeScale(std::move(segments));
}

} // namespace tscalc::cli
