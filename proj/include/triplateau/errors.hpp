#pragma once

#include <stdexcept>
#include <string>

namespace triplateau {

// Mesh/domain structure violations (mismatched chains, broken topology).
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Base for numerical failures that carry a residual or margin.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg, double residual = 0.0)
      : std::runtime_error(msg), residual(residual) {}
  double residual;
};

// A zero-area parameter triangle; the cotangent form is undefined.
struct DegenerateTriangleError : NumericalError {
  using NumericalError::NumericalError;
};

// All sheet energies vanish; weight formulas degenerate.
struct DegenerateMapError : NumericalError {
  using NumericalError::NumericalError;
};

// Linear solver failed to reach the requested residual.
struct SolverError : NumericalError {
  using NumericalError::NumericalError;
};

// Beltrami coefficient too close to the unit circle to march.
struct StabilityError : NumericalError {
  using NumericalError::NumericalError;
};

// Polynomial fit residual above the requested threshold.
struct AccuracyError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace triplateau
