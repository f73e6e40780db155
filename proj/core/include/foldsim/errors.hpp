#pragma once

#include <stdexcept>
#include <string>

namespace foldsim {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Curve construction rejected (collinear parabola data, mismatched radii, ...).
struct DegenerateCurve : Error {
  using Error::Error;
};

// Requested mesh size cannot resolve the domain.
struct MeshResolution : Error {
  using Error::Error;
};

// Vertex chain could not be aligned with the fold arc.
struct SnapFailure : Error {
  using Error::Error;
};

// Invalid mesh data (file contents or topology).
struct MeshError : Error {
  using Error::Error;
};

// Edge-local operation invoked on a boundary edge.
struct NotInterior : Error {
  using Error::Error;
};

// Gradient-jump lifting requested across a fold edge.
struct ExcludedEdge : Error {
  using Error::Error;
};

// Linear solver breakdown or unacceptable residual.
struct SolveFailure : Error {
  using Error::Error;
};

// Initial iterate violates the admissibility threshold.
struct AdmissibilityError : Error {
  using Error::Error;
};

// A runtime-checked identity of the scheme failed to hold.
struct InvariantBreach : Error {
  using Error::Error;
};

// Configuration file is malformed or inconsistent.
struct ConfigError : Error {
  using Error::Error;
};

// Requested feature outside the supported range (e.g. quadrature order).
struct Unsupported : Error {
  using Error::Error;
};

// Internal consistency failure; indicates a bug, not bad input.
struct InternalError : Error {
  using Error::Error;
};

}  // namespace foldsim
