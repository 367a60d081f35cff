#pragma once

#include <stdexcept>
#include <string>

namespace sparselab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input: bad cube, bad parameters, bad files.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// An iterative or spectral computation failed to reach its tolerance.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double last_value = 0.0, double residual = 0.0)
        : Error(what), last_value_(last_value), residual_(residual) {}

    double last_value() const noexcept { return last_value_; }
    double residual() const noexcept { return residual_; }

private:
    double last_value_;
    double residual_;
};

} // namespace sparselab
