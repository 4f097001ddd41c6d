#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cartan {

// Base of every library error. Math errors map to CLI exit code 1,
// parse and usage errors to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MathError : public Error {
public:
    using Error::Error;
};

class PoleError : public MathError {
public:
    using MathError::MathError;
};

class RankDeficiency : public MathError {
public:
    using MathError::MathError;
};

class DomainError : public MathError {
public:
    using MathError::MathError;
};

class Cancelled : public Error {
public:
    Cancelled() : Error("operation cancelled") {}
};

class UsageError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line), column_(column), message_(message) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& detail() const { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

}  // namespace cartan
