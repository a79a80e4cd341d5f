#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wfk {

// Half-open character range [begin, end) into an expression source string.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    enum class Kind { syntax, unknown_identifier, index_out_of_range };

    ParseError(Kind kind, Span span, const std::string& message)
        : Error(message), kind_(kind), span_(span) {}

    Kind kind() const { return kind_; }
    Span span() const { return span_; }

private:
    Kind kind_;
    Span span_;
};

// Division by zero, log/sqrt of a non-positive value, or a non-finite result.
class DomainError : public Error {
public:
    DomainError(Span span, const std::string& message) : Error(message), span_(span) {}
    Span span() const { return span_; }

private:
    Span span_;
};

// Singular or indefinite metric, bad step sizes, malformed tensor inputs.
class GeometryError : public Error {
public:
    using Error::Error;
};

// A structure record that violates its invariants (dimensions, dual basis, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace wfk
