#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adascale {

/// Raised when a caller violates a documented precondition.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by dataset/config/checkpoint readers. Carries the 1-based line
/// number of the offending input when one is known (0 otherwise).
class LoadError : public std::runtime_error {
 public:
  LoadError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace adascale
