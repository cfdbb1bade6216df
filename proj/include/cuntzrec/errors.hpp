#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cuntzrec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nonpositive alphabet size / word length, or a basis above the dimension cap.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A word with an unknown letter or a length above the truncation level.
class WordError : public Error {
 public:
  using Error::Error;
};

/// Operands built on different word bases.
class BasisMismatch : public Error {
 public:
  using Error::Error;
};

/// Numerical precondition violated (zero vector, non-unitary matrix,
/// non-Hermitian input detected through a complex fidelity, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An operator product would leave the subspace on which it is exact.
class DepthBudgetError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// The recovery constraint system has no nonnegative solution.
class InfeasibleRecovery : public Error {
 public:
  InfeasibleRecovery(const std::string& what, std::vector<int> failing,
                     double residual)
      : Error(what), failing_equations(std::move(failing)), residual(residual) {}

  /// Code-basis indices whose equation is not satisfied.
  std::vector<int> failing_equations;
  double residual;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cuntzrec
