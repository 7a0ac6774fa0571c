#pragma once

#include <stdexcept>
#include <string>

namespace seqscreen {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the support of a distribution or lattice.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A defining integral (tail, inverse hazard, conditional mean) diverges.
class IntegrabilityError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double partial_value, double error_estimate)
        : Error(what), partial_value_(partial_value), error_estimate_(error_estimate) {}

    double partial_value() const noexcept { return partial_value_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double partial_value_;
    double error_estimate_;
};

/// h_v(V) is too small for the gamma ratio to be meaningful.
class DensityUnderflowError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input (bad arguments, bad model parameters).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Model spec file could not be parsed. Carries the offending line when known.
class SpecError : public Error {
public:
    SpecError(const std::string& what, int line = 0) : Error(what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// An internal consistency check failed (e.g. relabeling identities).
class SelfCheckError : public Error {
public:
    using Error::Error;
};

/// Too many grid evaluations failed for a report to be meaningful.
class EvaluationError : public Error {
public:
    using Error::Error;
};

}  // namespace seqscreen
