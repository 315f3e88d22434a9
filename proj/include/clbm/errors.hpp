#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clbm {

/// Raised for parameter values outside their admissible range.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The closed-form gradient system has a vanishing denominator.
class SingularSystem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unsupported boundary topology or face assignment.
class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Density dropped to zero or below (or became NaN) at some node.
class NonPositiveDensity : public std::runtime_error {
public:
    NonPositiveDensity(const std::string& what, std::size_t node)
        : std::runtime_error(what), node_(node) {}
    [[nodiscard]] std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error(what), line_(line) {}
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

/// Reference data lacks any nonzero value.
class ZeroReference : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Both ends of a stability bracket gave the same verdict.
class BracketNotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace clbm
