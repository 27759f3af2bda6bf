#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sigsub {

/// Malformed input line. `line()` is 1-based; 0 when the error is not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Missing, duplicate or out-of-range class label.
class LabelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally valid input that does not form a usable two-class database.
class ValidityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Permutation statistics requested over an empty testable set.
class NoTestableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable input or unwritable output path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sigsub
