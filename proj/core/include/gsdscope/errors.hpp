#pragma once

#include <stdexcept>
#include <string>

namespace gsdscope {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid physical input (negative radius, non-positive waist, ...).
struct DomainError : Error {
    using Error::Error;
};

/// Malformed text input (quantity strings, CSV rows).
struct ParseError : Error {
    using Error::Error;
};

/// Structurally invalid configuration (unknown keys, missing sections,
/// insufficient data for a fit).
struct ConfigError : Error {
    using Error::Error;
};

/// A numerical guarantee cannot be met (grid too coarse, truncated
/// thermal weight, density mass missing from the grid).
struct AccuracyError : Error {
    using Error::Error;
};

/// Near-vanishing denominator in an analytic expression.
struct SingularityError : DomainError {
    using DomainError::DomainError;
};

/// Optimizer failure (rank-deficient Jacobian, no converged run).
struct FitError : Error {
    using Error::Error;
};

} // namespace gsdscope
