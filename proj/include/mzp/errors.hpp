#pragma once

#include <stdexcept>
#include <string>

namespace mzp {

/// Malformed or out-of-range user input (bad ids, broken polygons, ...).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file could not be parsed; the message names the offending field or line.
class ParseError : public InputError {
public:
    using InputError::InputError;
};

/// Parsed data violates a structural invariant (dimensions, signs).
class ValidationError : public InputError {
public:
    using InputError::InputError;
};

/// The instance admits no feasible answer (disconnected cells, B0 too small).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Brute-force routine refused to run because the instance exceeds its size guard.
class GuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A solver returned a status the caller cannot continue from.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mzp
