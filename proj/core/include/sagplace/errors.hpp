#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sagplace {

/// Malformed or inconsistent user input (bad files, out-of-range parameters).
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A facility set with no open facility was handed to an objective.
class EmptyPolicy : public std::invalid_argument {
 public:
  EmptyPolicy() : std::invalid_argument("facility set is empty; every node needs an open facility") {}
};

/// Exhaustive search refused because the subset count exceeds the guard.
class InstanceTooLarge : public std::runtime_error {
 public:
  InstanceTooLarge(const std::string& what, double subsets)
      : std::runtime_error(what), subsets_(subsets) {}

  double subsets() const noexcept { return subsets_; }

 private:
  double subsets_;
};

}  // namespace sagplace
