#pragma once

#include <stdexcept>
#include <string>

namespace ncwave {

/// Base class for all errors raised by the library. `module()` names the
/// component that detected the problem so CLI diagnostics can report it.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// Grid too small for the operator closures, or mismatched sizes.
class SizingError : public Error {
public:
    using Error::Error;
};

/// Requested (order, kind) combination is not available.
class UnsupportedOperatorError : public Error {
public:
    using Error::Error;
};

/// Constraint Gram matrix is singular or too ill-conditioned to factor.
class RankDeficiencyError : public Error {
public:
    using Error::Error;
};

/// Operation called with arguments that do not apply (e.g. SAT for projection).
class MisuseError : public Error {
public:
    using Error::Error;
};

/// Time integration blew up.
class InstabilityError : public Error {
public:
    InstabilityError(const std::string& what, long step, double growth)
        : Error("time_integration", what), step_(step), growth_(growth) {}

    long step() const noexcept { return step_; }
    double growth() const noexcept { return growth_; }

private:
    long step_;
    double growth_;
};

/// Power iteration did not settle within the iteration cap.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_estimate, double last_change)
        : Error("diagnostics", what), last_estimate_(last_estimate), last_change_(last_change) {}

    double last_estimate() const noexcept { return last_estimate_; }
    double last_change() const noexcept { return last_change_; }

private:
    double last_estimate_;
    double last_change_;
};

/// Malformed configuration text or values.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("harness", what) {}
};

}  // namespace ncwave
