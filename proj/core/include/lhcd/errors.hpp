#pragma once

#include <stdexcept>
#include <string>

namespace lhcd {

// Bad user input: unknown ids, malformed files, out-of-range arguments.
// CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A request that exceeds a configured search budget (subset enumeration
// caps, permutation caps). CLI maps this to exit code 3.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure that ridge regularization could not rescue.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lhcd
