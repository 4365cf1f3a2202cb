#pragma once

#include <stdexcept>
#include <string>

namespace weedbot {

/// Invalid input to a domain operation (bad dimensions, empty lists, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A linkage whose loop-closure equation has no real solution.
class LinkGeometryError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A gantry target outside the working envelope.
class OutOfRangeError : public std::out_of_range {
public:
    OutOfRangeError(const std::string& axis, const std::string& what)
        : std::out_of_range(what), axis_(axis)
    {
    }
    [[nodiscard]] const std::string& axis() const { return axis_; }

private:
    std::string axis_;
};

/// Operating the laser in a state where it is unsafe to do so.
class SafetyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class DegenerateFitError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace weedbot
