#pragma once

#include <stdexcept>
#include <string>

namespace growthwave {

// Bad input: out-of-range parameters, malformed configs, inconsistent resolutions.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical procedure failed to meet its own contract (non-convergence, band skip).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace growthwave
