#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace dasdn {

/// Raised when an iterative numeric routine fails or produces non-finite values.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what,
                        std::optional<std::size_t> iteration = std::nullopt)
      : std::runtime_error(what), iteration_(iteration) {}

  /// Iteration index at which the failure was detected, when applicable.
  std::optional<std::size_t> iteration() const noexcept { return iteration_; }

 private:
  std::optional<std::size_t> iteration_;
};

/// Malformed file contents (bad magic, truncated payload, broken header).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that uses a feature this library does not handle.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dasdn
