#pragma once

#include <stdexcept>
#include <string>

namespace krylab {

// Error taxonomy. The CLI maps these onto exit codes:
// ConfigError -> 2, NumericError (and subclasses) -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

// Shape / precondition violations: non-square input, dimension mismatch,
// empty input, invalid parameters.
class StructuralError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "structural"; }
};

class NumericError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "numeric"; }
};

// Amplitude rows do not sum to one: the basis does not contain the orbit.
class BasisIncompleteError : public NumericError {
public:
    using NumericError::NumericError;
    const char* kind() const noexcept override { return "basis_incomplete"; }
};

class StepSizeError : public NumericError {
public:
    using NumericError::NumericError;
    const char* kind() const noexcept override { return "step_size"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config"; }
};

} // namespace krylab
