#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "gpfit/common.hpp"

namespace gpfit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its admissible domain (n < 2, X outside the unit cube, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be positive definite is not, numerically.
class ConditioningError : public Error {
 public:
  explicit ConditioningError(const std::string& what,
                             std::optional<std::size_t> pivot = std::nullopt)
      : Error(what), pivot_(pivot) {}

  /// Row at which a Cholesky factorization broke down, when known.
  std::optional<std::size_t> pivot() const { return pivot_; }

 private:
  std::optional<std::size_t> pivot_;
};

/// The outputs carry no information (constant Y), so the deviance is log(0).
class DegenerateOutputError : public Error {
 public:
  using Error::Error;
};

/// The objective returned a non-finite value at `probe`.
class ObjectiveError : public Error {
 public:
  ObjectiveError(const std::string& what, Vector probe)
      : Error(what), probe_(std::move(probe)) {}
  const Vector& probe() const { return probe_; }

 private:
  Vector probe_;
};

/// Every optimizer run failed.
class OptimizationError : public Error {
 public:
  using Error::Error;
};

/// Request the library deliberately does not serve (grids for d > 2, ...).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace gpfit
