#pragma once

#include <stdexcept>
#include <string>

namespace strip {

/// Parameter outside its admissible set (maps to CLI exit code 2).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A stationary object was requested in a regime where it does not exist.
class RegimeError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A numerical procedure failed to deliver its contract (exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BracketError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace strip
