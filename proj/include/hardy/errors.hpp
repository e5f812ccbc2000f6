#pragma once

#include <stdexcept>
#include <string>

namespace hardy {

enum class ErrorKind {
  parameter,
  boundary_exterior,
  ridge,
  focal_point,
  non_integrable_exponent,
  geometry_failure,
  degenerate_map,
  class_violation,
  construction_failure,
  degenerate_field,
  convergence_failure,
  mesh_failure,
  range,
  applicability,
  sampling,
  hypothesis_violation,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised for queries at or outside the boundary; carries the signed distance
/// (positive inside, negative outside).
class BoundaryExteriorError : public Error {
 public:
  BoundaryExteriorError(double signed_distance, const std::string& what)
      : Error(ErrorKind::boundary_exterior, what), signed_distance_(signed_distance) {}
  double signed_distance() const { return signed_distance_; }

 private:
  double signed_distance_;
};

/// Raised when an iterative solver stops without meeting its tolerance; the
/// last Rayleigh quotient is attached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(double last_value, int iterations, const std::string& what)
      : Error(ErrorKind::convergence_failure, what), last_value_(last_value), iterations_(iterations) {}
  double last_value() const { return last_value_; }
  int iterations() const { return iterations_; }

 private:
  double last_value_;
  int iterations_;
};

}  // namespace hardy
