#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vehfog {

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Input parsed but violates a structural invariant (overlap, ordering, bounds).
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Bad scenario configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using DomainError = std::domain_error;
using RangeError = std::out_of_range;

}  // namespace vehfog
