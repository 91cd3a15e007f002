#pragma once

#include <stdexcept>
#include <string>

namespace fiberqed {

/// Input outside the domain of an operation (bad geometry, out-of-window wavelength, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Precondition of an operation not met by otherwise valid inputs.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Root finding or linear solve failed.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Series or quadrature did not reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed run configuration or command line.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace fiberqed
