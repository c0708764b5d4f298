#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ofnet {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EntropyFailure : public Error {
public:
    using Error::Error;
};

/// A derived advertisement scalar reduced to zero modulo the group order.
class DegenerateKey : public Error {
public:
    explicit DegenerateKey(std::size_t index)
        : Error("degenerate advertisement key at index " + std::to_string(index)), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class TimeBeforeCreation : public Error {
public:
    using Error::Error;
};

/// Public key bytes that do not name a point on P-224.
class InvalidPublicKey : public Error {
public:
    using Error::Error;
};

/// AEAD tag mismatch. Deliberately carries no detail about the cause.
class AuthenticationFailure : public Error {
public:
    AuthenticationFailure() : Error("report authentication failed") {}
};

class LengthMismatch : public Error {
public:
    LengthMismatch(std::string what, std::size_t expected, std::size_t actual)
        : Error(what + ": expected " + std::to_string(expected) + " bytes, got " + std::to_string(actual)),
          expected_(expected), actual_(actual) {}
    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

/// Malformed text input. `line()` is 1-based, 0 when not line-oriented.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class RangeError : public Error {
public:
    using Error::Error;
};

}  // namespace ofnet
