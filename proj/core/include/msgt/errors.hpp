#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msgt {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

/// Configuration or expression text could not be parsed.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(message + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          message_(message), line_(line), column_(column) {}

    const std::string& message() const noexcept { return message_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::string message_;
    std::size_t line_;
    std::size_t column_;
};

/// Invalid argument passed to an operation (dimension mismatch, bad range, ...).
class InputError : public Error {
public:
    using Error::Error;
};

/// Arithmetic failure while evaluating an expression.
class EvalError : public Error {
public:
    using Error::Error;
};

/// A value fell outside the domain of a map, signal, or system.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Time integration could not be completed.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& message, double last_time)
        : Error(message + " (last reached time " + std::to_string(last_time) + ")"),
          last_time_(last_time) {}

    double last_time() const noexcept { return last_time_; }

private:
    double last_time_;
};

}  // namespace msgt
