#pragma once

#include <stdexcept>
#include <string>

namespace crgeom {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands have incompatible shapes or ambient dimensions.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A local cross section was evaluated outside the neighbourhood where its factors are invertible.
class OutsideNeighborhood : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// An iterative kernel exhausted its budget.
class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Malformed matrix or configuration input.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace crgeom
