#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace cmdist {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, out-of-range indices, violated preconditions.
class InputError : public Error {
public:
    using Error::Error;
};

class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class RangeError : public InputError {
public:
    using InputError::InputError;
};

class EmptyDatasetError : public InputError {
public:
    using InputError::InputError;
};

class DimensionError : public InputError {
public:
    using InputError::InputError;
};

class CapacityError : public InputError {
public:
    using InputError::InputError;
};

/// Raised when an operation needs an antimonotonic family.
class BasisError : public InputError {
public:
    using InputError::InputError;
};

class LengthError : public InputError {
public:
    using InputError::InputError;
};

class ValidationError : public InputError {
public:
    using InputError::InputError;
};

/// Numerical failure: singular matrices, inconsistent constraint systems.
class NumericalError : public Error {
public:
    using Error::Error;
};

class SingularityError : public NumericalError {
public:
    SingularityError(const std::string& what, double smallest)
        : NumericalError(what + " (smallest pivot/eigenvalue " + format(smallest) + ")"),
          smallest_(smallest) {}

    double smallest() const noexcept { return smallest_; }

private:
    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        return buf;
    }

    double smallest_;
};

class InconsistentConstraintsError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace cmdist
