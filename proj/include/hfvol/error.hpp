#pragma once

#include <stdexcept>
#include <string>

namespace hfvol {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a precondition (bad prices, degenerate series, lag out of range).
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration: calendars, format descriptors, parameter invariants.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numeric breakdown of a recursion or a linear solve.
class NumericError : public Error {
public:
    NumericError(const std::string& what, long index = -1)
        : Error(what), index_(index) {}

    /// Offending observation index, or -1 when not tied to one.
    long index() const noexcept { return index_; }

private:
    long index_;
};

} // namespace hfvol
