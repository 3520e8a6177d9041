#pragma once

#include <stdexcept>
#include <string>

namespace dcu {

// Machine-readable failure codes. The CLI maps these 1:1 onto the "error"
// field of its JSON error reports, so names are part of the tool's interface.
enum class ErrorCode {
  // surface / metric construction
  NonManifold,
  Disconnected,
  EulerObstruction,
  InvalidGluing,
  NonPositiveLength,
  DegenerateTriangle,
  GaussBonnetViolation,
  // flips
  NonConvexQuad,
  UnflippableEdge,
  FlipBudgetExceeded,
  // solver
  NotDelaunay,
  MetricDegenerate,
  MaxItersExceeded,
  LineSearchStalled,
  StepTooLarge,
  // io
  ParseError,
  NonTriangular,
  OpenBoundary,
  InvalidMetric,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dcu
