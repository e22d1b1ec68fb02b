#pragma once

#include <string_view>

#include "tscalc/time_scale.hpp"

namespace tscalc::cli {

/// Parses the clause grammar for time scales:
///   interval(a,b)            closed real interval; a,b may be -inf/inf
///   grid(c,from,to)          lattice with step c; from/to may be -inf/inf,
///                            optional origin= when unbounded both ways
///   qgrid(q,side)            closure of q^Z (side +) or -q^Z (side -),
///                            optional kmin=/kmax= exponent bounds
///   qsym(q)                  Q_q, both closures glued at 0
/// Clauses are joined with ';' and may use name=value arguments, e.g.
/// "qgrid(q=2,side=+)". Syntax problems throw ParseError; segment layout
/// problems (gap, overlap, dense-to-dense junction) surface as
/// ValidationError from the TimeScale constructor.
TimeScale parse_timescale(std::string_view text);

} // namespace tscalc::cli
