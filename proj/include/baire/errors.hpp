#pragma once

#include <stdexcept>
#include <string>

namespace baire {

// Base of every error the library raises on bad input or configuration.
// Anything else escaping the library is an internal fault.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Value outside the domain an operation accepts (negative numeral, k > n, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

// Digit keys built with different base / precision / integer-digit convention.
class ConventionError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

// Exponential-cost demo asked to run above its size limit.
class ScaleError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

// A data row that could not be converted; carries the 1-based line number.
class RowError : public Error {
public:
    RowError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace baire
