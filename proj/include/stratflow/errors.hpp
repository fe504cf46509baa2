#pragma once

#include <stdexcept>
#include <string>

namespace stratflow {

/// Invalid or inconsistent user configuration (non-integral grid ratio,
/// Courant number out of range, unknown preset, ...).
class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Grid too coarse to represent the domain.
class ResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (z above the lid, rho <= 0).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Neumann right-hand side with non-zero mean.
class CompatibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver hit its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input series or file.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite field values or runaway velocities during integration.
class NumericBlowup : public std::runtime_error {
public:
    NumericBlowup(const std::string& what, long step)
        : std::runtime_error(what), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

} // namespace stratflow
