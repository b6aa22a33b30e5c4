#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace maxattn {

/// Operand shapes do not fit the requested operation.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A precondition on a scalar argument was violated (nonpositive epsilon, p < 1, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// |f| reached or exceeded the strict bound b0 that the E/T logs rely on.
class BoundViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A construction would exceed the desk-scale size caps.
class CapExceeded : public std::length_error {
 public:
  CapExceeded(const std::string& what, std::size_t limiting_size)
      : std::length_error(what), limiting_size_(limiting_size) {}

  /// The offending count (G, G^2 or the dense matrix order).
  std::size_t limiting_size() const noexcept { return limiting_size_; }

 private:
  std::size_t limiting_size_;
};

/// A public operation produced NaN or infinity.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace maxattn
