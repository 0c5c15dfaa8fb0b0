#pragma once

#include <stdexcept>
#include <string>

namespace onebit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (non-finite input, p outside [0,1]).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Conditional density requested with |r| >= 1.
class DegenerateCorrelationError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Inconsistent or out-of-range configuration (grid sizes, parameters, flags).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed mapping/decoder file. The message carries the offending line number.
class ParseError : public Error {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace onebit
