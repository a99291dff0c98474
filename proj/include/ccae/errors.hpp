#ifndef CCAE_ERRORS_HPP
#define CCAE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ccae {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text (CSV rows, config files). Carries a human-readable
// location in the message.
struct ParseError : Error {
    using Error::Error;
};

// Structurally valid input that violates a domain invariant
// (duplicate dates, high < low, coverage gaps).
struct DataError : Error {
    using Error::Error;
};

// Invalid configuration or incompatible shapes at the API boundary.
struct ConfigError : Error {
    using Error::Error;
};

// Series too short for the requested operation.
struct InsufficientDataError : Error {
    using Error::Error;
};

// Undefined numeric result (zero variance, degenerate batch).
struct NumericError : Error {
    using Error::Error;
};

// Tensor shape mismatch inside the numerical core.
struct ShapeError : Error {
    using Error::Error;
};

// Non-finite loss or gradient during optimization.
struct DivergenceError : Error {
    using Error::Error;
};

// Calendar or index arithmetic out of representable range.
struct RangeError : Error {
    using Error::Error;
};

// Filesystem / network failures.
struct IoError : Error {
    using Error::Error;
};

} // namespace ccae

#endif
