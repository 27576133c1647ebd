#pragma once

#include <stdexcept>
#include <string>

namespace fermibath {

// Runtime invariant violation: spectrum out of bounds, purity loss,
// ill-conditioned solve. Mapped to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Request exceeds a configured resource cap. Mapped to CLI exit code 3.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fermibath
