#pragma once

#include <string>

namespace tscalc {

/// Shortest decimal string that parses back to the identical double.
/// Locale-independent, '.' decimal separator. Infinities print as
/// "inf"/"-inf"; negative zero is normalized to "0".
std::string format_real(double x);

} // namespace tscalc
