#include "dcu/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dcu {

namespace {

void check_positive(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw Error(ErrorCode::NonPositiveLength,
                "edge lengths must be positive and finite, got " +
                    std::to_string(x));
}

// Slack of the triangle inequality relative to the perimeter; negative when
// violated, and degenerate (collinear) at zero.
double relative_slack(double a, double b, double c) {
  double m = std::min({a + b - c, b + c - a, c + a - b});
  return m / (a + b + c);
}

}  // namespace

double corner_angle(double a, double b, double c) {
  check_positive(a);
  check_positive(b);
  check_positive(c);
  if (relative_slack(a, b, c) <= kDegenerateSlackTol)
    throw Error(ErrorCode::DegenerateTriangle,
                "triangle (" + std::to_string(a) + ", " + std::to_string(b) +
                    ", " + std::to_string(c) + ") is degenerate");
  double cosv = (a * a + b * b - c * c) / (2.0 * a * b);
  return std::acos(std::clamp(cosv, -1.0, 1.0));
}

std::array<double, 3> face_angles(const MarkedSurface& m, const PLMetric& d,
                                  FaceId f) {
  const FaceSpec& fs = m.face(f);
  double l0 = d[fs.e[0]], l1 = d[fs.e[1]], l2 = d[fs.e[2]];
  // Corner k lies between sides k and k-1 and faces side k+1.
  return {corner_angle(l0, l2, l1), corner_angle(l1, l0, l2),
          corner_angle(l2, l1, l0)};
}

double vertex_cone_angle(const MarkedSurface& m, const PLMetric& d,
                         VertexId v) {
  double sum = 0.0;
  for (FaceId f = 0; f < m.face_count(); f++) {
    const FaceSpec& fs = m.face(f);
    if (fs.v[0] != v && fs.v[1] != v && fs.v[2] != v) continue;
    std::array<double, 3> ang = face_angles(m, d, f);
    for (int k = 0; k < 3; k++)
      if (fs.v[k] == v) sum += ang[k];
  }
  return sum;
}

double vertex_curvature(const MarkedSurface& m, const PLMetric& d, VertexId v) {
  return 2.0 * std::numbers::pi - vertex_cone_angle(m, d, v);
}

CurvatureField curvature_field(const MarkedSurface& m, const PLMetric& d) {
  std::vector<double> cone(m.vertex_count(), 0.0);
  for (FaceId f = 0; f < m.face_count(); f++) {
    std::array<double, 3> ang = face_angles(m, d, f);
    const FaceSpec& fs = m.face(f);
    for (int k = 0; k < 3; k++) cone[fs.v[k]] += ang[k];
  }
  CurvatureField kf{std::move(cone)};
  double total = 0.0;
  for (VertexId v = 0; v < m.vertex_count(); v++) {
    kf.k[v] = 2.0 * std::numbers::pi - kf.k[v];
    total += kf.k[v];
  }
  double expected = 2.0 * std::numbers::pi * m.euler_characteristic();
  if (std::abs(total - expected) > 1e-9)
    throw Error(ErrorCode::GaussBonnetViolation,
                "total curvature " + std::to_string(total) +
                    " deviates from 2*pi*chi = " + std::to_string(expected) +
                    " (internal bug)");
  return kf;
}

PLMetric conformal_scale(const MarkedSurface& m, const PLMetric& d,
                         const ConformalFactor& u) {
  PLMetric out = d;
  for (EdgeId e = 0; e < m.edge_count(); e++) {
    auto ab = m.endpoints(e);
    out[e] = d[e] * std::exp(u[ab[0]] + u[ab[1]]);
  }
  return out;
}

std::vector<FaceId> validate_metric(const MarkedSurface& m, const PLMetric& d) {
  if (d.edge_count() != m.edge_count())
    throw Error(ErrorCode::NonPositiveLength,
                "metric has " + std::to_string(d.edge_count()) +
                    " lengths for " + std::to_string(m.edge_count()) +
                    " edges");
  for (EdgeId e = 0; e < m.edge_count(); e++) check_positive(d[e]);
  std::vector<FaceId> bad;
  for (FaceId f = 0; f < m.face_count(); f++) {
    const FaceSpec& fs = m.face(f);
    if (relative_slack(d[fs.e[0]], d[fs.e[1]], d[fs.e[2]]) <=
        kDegenerateSlackTol)
      bad.push_back(f);
  }
  return bad;
}

void require_valid_metric(const MarkedSurface& m, const PLMetric& d) {
  std::vector<FaceId> bad = validate_metric(m, d);
  if (!bad.empty())
    throw Error(ErrorCode::DegenerateTriangle,
                "face " + std::to_string(bad.front()) +
                    " violates the triangle inequality");
}

}  // namespace dcu
