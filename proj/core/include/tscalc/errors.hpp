#pragma once

#include <stdexcept>
#include <string>

namespace tscalc {

/// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated precondition or malformed input (bad segment list, point not in
/// the time scale, alpha outside [0,1], target below the anchor, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Mathematical domain failure: regressivity violation on an evaluation
/// path, logarithm of a non-positive number, fractional power of a
/// negative exponential value.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An infinite matrix product near an accumulation point failed to
/// stabilize. Carries the failed convergence criterion in the message.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature exhausted its recursion depth before reaching the
/// requested tolerance, or met a non-finite integrand value.
class QuadratureError : public Error {
public:
    using Error::Error;
};

} // namespace tscalc
