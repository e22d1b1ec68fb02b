#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tscalc/solver.hpp"
#include "tscalc/time_scale.hpp"

namespace tscalc::cli {

/// One command invocation, assembled from a spec file (--job) overlaid with
/// command-line flags. Flags win over file values.
struct JobSpec {
    std::string command;
    std::optional<std::string> ts;
    std::optional<double> alpha;
    std::optional<std::string> p;
    std::optional<std::string> f;
    std::optional<double> t0;
    std::optional<double> y0;
    std::optional<std::string> targets;
    std::optional<double> tol;
    std::optional<std::string> out;
};

JobSpec parse_command_line(const std::vector<std::string>& args);

/// Expands the --targets grammar against a concrete time scale:
/// comma-separated numbers, scattered ranges "a..b", and sampled ranges
/// "a..b:n" (n+1 evenly spaced points snapped onto T).
std::vector<Point> parse_targets(const TimeScale& ts, const std::string& text);

} // namespace tscalc::cli
