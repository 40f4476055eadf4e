#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wavest {

/// Invalid argument: degree out of range, empty mesh, point outside an interval, ...
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Problem data violates a physical precondition (e.g. nonpositive wave speed).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A slab system could not be factorized.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::size_t slab)
      : std::runtime_error(what + " (slab " + std::to_string(slab) + ")"), slab_(slab) {}
  std::size_t slab() const noexcept { return slab_; }

 private:
  std::size_t slab_;
};

/// Fixed-point iteration did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::size_t slab, double residual, int iterations)
      : std::runtime_error("fixed-point iteration did not converge in slab " + std::to_string(slab) +
                           " after " + std::to_string(iterations) +
                           " iterations (last update " + std::to_string(residual) + ")"),
        slab_(slab),
        residual_(residual) {}
  std::size_t slab() const noexcept { return slab_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t slab_;
  double residual_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wavest
