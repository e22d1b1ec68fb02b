#pragma once

#include <functional>

namespace tscalc {

/// Adaptive Simpson quadrature with absolute tolerance and a recursion cap.
/// Throws QuadratureError on non-finite integrand values or when the depth
/// cap is reached before the tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double x0, double x1,
                        double abs_tol = 1e-12, int max_depth = 40);

} // namespace tscalc
