#pragma once

#include <stdexcept>
#include <string>

namespace bcfar {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition or type-invariant violation (bad k, negative sample, Pfa outside (0,1), ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// The k-th order statistic of the window is zero, so no scale can be inferred from it.
class DegenerateWindowError : public DomainError {
public:
    using DomainError::DomainError;
};

// Inconsistent or unsupported configuration (target/clutter pairing, window layout, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Numerical failure: the inputs were valid but the computation could not deliver.
class NumericError : public Error {
public:
    using Error::Error;
};

// Adaptive quadrature ran out of subdivisions. Carries the best estimate reached.
class ConvergenceError : public NumericError {
public:
    ConvergenceError(const std::string& what, double best_estimate, double error_estimate)
        : NumericError(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double best_estimate_;
    double error_estimate_;
};

class RootError : public NumericError {
public:
    enum class Kind { target_unreachable, no_root };

    RootError(Kind kind, const std::string& what) : NumericError(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// A closed-form evaluation produced a non-finite value or could not be trusted.
class EvaluationError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace bcfar
