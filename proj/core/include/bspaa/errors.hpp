#pragma once

#include <stdexcept>
#include <string>

namespace bspaa {

// Raised when an input is valid but outside what the numerics are certified
// for (for example alternating binomial sums beyond the supported sample size).
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

// A quadrature or root search failed to meet its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bspaa
