#pragma once

#include <stdexcept>
#include <string>

namespace manifold_descent {

/// Bad dimensions, missing state components, or out-of-domain parameters.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation produced a NaN or infinity.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Requested operation has no implementation for this objective or family.
class UnsupportedError : public std::logic_error {
 public:
  explicit UnsupportedError(const std::string& what) : std::logic_error(what) {}
};

/// A diagnostic was asked about a trajectory that does not meet its precondition.
class PreconditionError : public std::logic_error {
 public:
  explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace manifold_descent
