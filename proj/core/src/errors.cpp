#include "dcu/errors.hpp"

namespace dcu {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonManifold: return "NonManifold";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::EulerObstruction: return "EulerObstruction";
    case ErrorCode::InvalidGluing: return "InvalidGluing";
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::GaussBonnetViolation: return "GaussBonnetViolation";
    case ErrorCode::NonConvexQuad: return "NonConvexQuad";
    case ErrorCode::UnflippableEdge: return "UnflippableEdge";
    case ErrorCode::FlipBudgetExceeded: return "FlipBudgetExceeded";
    case ErrorCode::NotDelaunay: return "NotDelaunay";
    case ErrorCode::MetricDegenerate: return "MetricDegenerate";
    case ErrorCode::MaxItersExceeded: return "MaxItersExceeded";
    case ErrorCode::LineSearchStalled: return "LineSearchStalled";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonTriangular: return "NonTriangular";
    case ErrorCode::OpenBoundary: return "OpenBoundary";
    case ErrorCode::InvalidMetric: return "InvalidMetric";
  }
  return "UnknownError";
}

}  // namespace dcu
