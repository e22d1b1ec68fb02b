#pragma once

#include <iosfwd>

#include "job.hpp"

namespace tscalc::cli {

/// Executes one job. Tables and reports go to `out` (or the --out file),
/// human-readable progress/diagnostics to `err`. Returns the process exit
/// code for non-exceptional outcomes (0, or 1 for a failed verify);
/// precondition and math failures propagate as exceptions for main() to map
/// onto the documented exit codes.
int run_job(const JobSpec& job, std::ostream& out, std::ostream& err);

} // namespace tscalc::cli
