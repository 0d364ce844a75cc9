#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace typek {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// A value outside the domain an operation is defined on (non-finite input,
/// f_i(x) <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Non-finite evaluation of a growth function.
class EvaluationError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// A standing hypothesis of the planar theory does not hold for the map at hand.
class HypothesisViolation : public Error {
public:
    using Error::Error;
};

/// Iterative numerics did not converge.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Newton inversion found no preimage in the working box.
class NotInImage : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class UnsupportedDimension : public Error {
public:
    using Error::Error;
};

/// Nullcline arcs (nearly) coincide; the fixed-point set may be a continuum.
class DegenerateConfiguration : public Error {
public:
    using Error::Error;
};

class ResolutionInsufficient : public Error {
public:
    using Error::Error;
};

}  // namespace typek
