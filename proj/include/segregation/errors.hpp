#pragma once

#include <stdexcept>
#include <string>

namespace segregation {

// Base for failures of the numerical core. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// A state left the admissible box 0 <= r, b and r + b <= 1.
class BoxViolation : public NumericalError {
public:
    explicit BoxViolation(const std::string& what) : NumericalError("BoxViolation", what) {}
};

class NonFinite : public NumericalError {
public:
    explicit NonFinite(const std::string& what) : NumericalError("NonFinite", what) {}
};

class NoConvergence : public NumericalError {
public:
    explicit NoConvergence(const std::string& what) : NumericalError("NoConvergence", what) {}
};

class BracketFailure : public NumericalError {
public:
    explicit BracketFailure(const std::string& what) : NumericalError("BracketFailure", what) {}
};

class NoInstability : public NumericalError {
public:
    explicit NoInstability(const std::string& what) : NumericalError("NoInstability", what) {}
};

class DomainError : public NumericalError {
public:
    explicit DomainError(const std::string& what) : NumericalError("DomainError", what) {}
};

// Time step exceeds the explicit stability restriction.
class TimeStepTooLarge : public NumericalError {
public:
    explicit TimeStepTooLarge(const std::string& what) : NumericalError("TimeStepTooLarge", what) {}
};

// Invalid user input (bad config, unsupported dimension, ...). Exit code 2 in the CLI.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace segregation
