#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sfiles {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lexical or structural failure while reading an SFILES string.
class ParseError : public Error {
public:
    ParseError(std::size_t position, std::string expected, std::string found)
        : Error(format(position, expected, found)),
          position_(position),
          expected_(std::move(expected)),
          found_(std::move(found)) {}

    std::size_t position() const noexcept { return position_; }
    const std::string& expected() const noexcept { return expected_; }
    const std::string& found() const noexcept { return found_; }

private:
    static std::string format(std::size_t position, const std::string& expected,
                              const std::string& found) {
        std::string msg = "parse error at offset " + std::to_string(position) + ": expected " +
                          expected;
        if (!found.empty()) {
            msg += ", found '" + found + "'";
        }
        return msg;
    }

    std::size_t position_;
    std::string expected_;
    std::string found_;
};

/// A graph invariant does not hold. The message names the violated invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The stream topology cannot be written as an SFILES string.
class SerializationError : public Error {
public:
    using Error::Error;
};

/// An operation was asked to enumerate or search a space above its bound.
class SizeError : public Error {
public:
    SizeError(std::string message, std::uint64_t count)
        : Error(std::move(message)), count_(count) {}

    std::uint64_t count() const noexcept { return count_; }

private:
    std::uint64_t count_;
};

/// Invalid configuration (split ratios, generator palette, experiment setup).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numeric argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Empty or malformed input data for model training or evaluation.
class DataError : public Error {
public:
    using Error::Error;
};

/// File or stream could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace sfiles
