#pragma once

#include <stdexcept>
#include <string>

namespace entire_dyn {

// Every numerical failure derives from NumericalError so the CLI can map it to
// a single exit status; contract violations derive from PreconditionError.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ZeroDivisionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ResidualError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RootFindingError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class PoleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

[[noreturn]] inline void fail_precondition(const std::string& where, const std::string& what)
{
    throw PreconditionError(where + ": " + what);
}

inline void require(bool cond, const char* where, const char* what)
{
    if (!cond) {
        fail_precondition(where, what);
    }
}

} // namespace detail
} // namespace entire_dyn
