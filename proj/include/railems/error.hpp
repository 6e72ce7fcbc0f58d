#pragma once

#include <stdexcept>
#include <string>

namespace railems {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed input file (JSON/CSV/MPS syntax).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that violates the documented schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Inputs that make the optimization problem infeasible before any solve,
/// e.g. train demand above the peak cap at some step.
class InfeasibleInputError : public Error {
public:
    InfeasibleInputError(const std::string& what, int step) : Error(what), step_(step) {}
    int step() const noexcept { return step_; }

private:
    int step_;
};

/// A solver result that fails the independent constraint re-check.
class InternalConsistencyError : public Error {
public:
    using Error::Error;
};

}  // namespace railems
