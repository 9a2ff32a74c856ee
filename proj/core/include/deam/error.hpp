#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deam {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters, contract terms or configuration values.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A query outside the domain of a function or grid.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Caller passed inconsistent arguments (length mismatch, bad flags).
class UsageError : public Error {
public:
    using Error::Error;
};

/// An iterative or quadrature routine failed to reach its tolerance.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, std::size_t iterations = 0, double residual = 0.0)
        : Error(what), iterations_(iterations), residual_(residual) {}

    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

/// Up factor u outside the range where the CRR probability lies in (0, 1).
class InadmissibleFactorError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// American put quote at (or within the exclusion margin of) its exercise value.
class ImmediateExerciseError : public Error {
public:
    using Error::Error;
};

/// No admissible up factor brackets the target price.
class BracketError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

/// Quote selection produced an empty set.
class SelectionError : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    using Error::Error;
};

}  // namespace deam
