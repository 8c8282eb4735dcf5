#pragma once

#include <stdexcept>
#include <string>

namespace twolaw {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Shape/size mismatch between states, Hamiltonians or rate matrices.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

/// A domain object failed an invariant (normalization, Hermiticity, ...).
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what) : Error(what) {}
};

/// Runtime numerical diagnostic (positivity breach, aliasing, step size).
class NumericsError : public Error {
 public:
  explicit NumericsError(const std::string& what) : Error(what) {}
};

}  // namespace twolaw
