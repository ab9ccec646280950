// errors.hpp — exception types raised by the cpbqed library

#pragma once

#include <stdexcept>
#include <string>

namespace cpbqed {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed parameters, scenario files or out-of-range arguments.
struct ValidationError : Error {
    using Error::Error;
};

// Fock truncation too small for the requested field state.
struct TruncationError : ValidationError {
    using ValidationError::ValidationError;
};

// Photon process order outside {1, 2, 3}.
struct UnsupportedOrder : ValidationError {
    using ValidationError::ValidationError;
};

// Mixing angle undefined (E_J = 0 and epsilon = 0).
struct DegenerateError : ValidationError {
    using ValidationError::ValidationError;
};

// Kraus series would need more terms than the configured cap.
struct ConvergenceError : Error {
    using Error::Error;
};

// Input matrix is not a physical state (negative eigenvalue, wrong trace, ...).
struct InvalidState : Error {
    using Error::Error;
};

// Concurrence requested on a projection carrying (almost) no weight.
struct NegligibleSupport : Error {
    using Error::Error;
};

// RK4 oracle lost trace beyond tolerance.
struct StepError : Error {
    using Error::Error;
};

// File could not be read or written.
struct IoError : Error {
    using Error::Error;
};

} // namespace cpbqed
