#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fockprop {

/// Mismatched mode counts, vector lengths or matrix shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A dense object would exceed the configured size budget.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, std::size_t estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  std::size_t estimate() const noexcept { return estimate_; }

 private:
  std::size_t estimate_;
};

/// A coherent vector is not resolved by the quanta cutoff.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, int required_quanta)
      : std::runtime_error(what), required_quanta_(required_quanta) {}
  /// Smallest cutoff M that would satisfy the tail tolerance.
  int required_quanta() const noexcept { return required_quanta_; }

 private:
  int required_quanta_;
};

}  // namespace fockprop
