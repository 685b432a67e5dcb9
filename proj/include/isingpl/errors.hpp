#pragma once

#include <stdexcept>
#include <string>

namespace ising {

// Bad user input / precondition violation (CLI maps these to exit code 2).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionMismatch : ConfigError {
    using ConfigError::ConfigError;
};

// Numeric / algorithmic failure (CLI maps these to exit code 3).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GenerationFailure : NumericError {
    using NumericError::NumericError;
};

struct NonConvergence : NumericError {
    using NumericError::NumericError;
};

// Thrown by the univariate solvers when the monotone map has no root.
struct NoRoot : NumericError {
    enum class Kind { Aligned, AntiAligned, DegenerateFields, AllEqualSpins };
    Kind kind;
    NoRoot(Kind k, const std::string& msg) : NumericError(msg), kind(k) {}
};

}  // namespace ising
