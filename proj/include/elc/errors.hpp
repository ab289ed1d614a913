#pragma once

#include <stdexcept>
#include <string>

namespace elc {

/// Base for every error the library raises. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A coefficient or parameter violates a required physical condition.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration, mismatched grids, or invalid call arguments.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Input data is corrupt: NaN/Inf values, asymmetric strain rate, etc.
class DataError : public Error {
public:
    using Error::Error;
};

/// The time integration produced non-finite or runaway values.
class BlowupError : public Error {
public:
    BlowupError(const std::string& what, long step) : Error(what), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace elc
