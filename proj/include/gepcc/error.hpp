#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gepcc {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration, layout or command-line usage.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Unreadable, malformed or out-of-domain input data.
class DataError : public Error {
public:
    using Error::Error;
};

/// The search never produced an individual with finite fitness.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Formula syntax error; `position` is the 0-based character offset.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t position)
        : Error(message + " at position " + std::to_string(position)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Identifier that is neither a declared variable nor a known function.
class UnknownIdentifierError : public ParseError {
public:
    UnknownIdentifierError(const std::string& name, std::size_t position)
        : ParseError("unknown identifier " + name, position), name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

}  // namespace gepcc
