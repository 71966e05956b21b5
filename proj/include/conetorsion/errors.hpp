#pragma once

#include <stdexcept>
#include <string>

namespace conetorsion {

// Numerical failures carry a distinct base so callers (and the CLI exit-code
// contract) can tell them apart from config/usage errors.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoDirichletBoundary : NumericalError {
  NoDirichletBoundary() : NumericalError("mesh has no GAMMA facets; the torsion problem needs a Dirichlet part") {}
};

struct NonConvergence : NumericalError {
  using NumericalError::NumericalError;
};

struct MeshFailure : NumericalError {
  using NumericalError::NumericalError;
};

struct VolumeMismatch : NumericalError {
  using NumericalError::NumericalError;
};

struct NotSpherical : NumericalError {
  using NumericalError::NumericalError;
};

struct NonConstantCurvature : NumericalError {
  using NumericalError::NumericalError;
};

struct StepFailure : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace conetorsion
