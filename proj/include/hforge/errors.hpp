#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hforge {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Arguments outside an operation's domain: policy/model mismatch, bad
// discount factor, out-of-range index, malformed source formula.
class DomainError : public Error {
public:
    using Error::Error;
};

// An enumeration or expansion would exceed its configured cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

} // namespace hforge
