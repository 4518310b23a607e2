#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace odtomo {

/// Precondition violated by the caller (bad sizes, out-of-range indices, ...).
class InvalidInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A joint cumulant was requested above the configured estimation order.
/// Callers treat the value as unresolvable rather than as bad input.
class OrderCapExceeded : public std::runtime_error {
  public:
    OrderCapExceeded(int order, int cap)
        : std::runtime_error("cumulant order " + std::to_string(order) + " exceeds cap " + std::to_string(cap)),
          order_(order), cap_(cap) {}

    [[nodiscard]] int order() const { return order_; }
    [[nodiscard]] int cap() const { return cap_; }

  private:
    int order_;
    int cap_;
};

/// Destination not reachable from the origin.
class NoPath : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; the message carries file and line context.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

    [[nodiscard]] const std::string& file() const { return file_; }
    [[nodiscard]] std::size_t line() const { return line_; }

  private:
    std::string file_;
    std::size_t line_;
};

} // namespace odtomo
