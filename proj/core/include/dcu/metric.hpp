#pragma once

#include <array>
#include <vector>

#include "dcu/surface.hpp"

namespace dcu {

// Flat cone metric on a marked surface: one positive length per edge id of a
// geometric triangulation. All cone points sit at marked vertices.
struct PLMetric {
  std::vector<double> lengths;  // edge id -> length

  double operator[](EdgeId e) const { return lengths[e]; }
  double& operator[](EdgeId e) { return lengths[e]; }
  int edge_count() const { return static_cast<int>(lengths.size()); }
};

// Per-vertex logarithmic scale factor u: an edge from v to v' is multiplied
// by e^{u(v)+u(v')}, so a loop at v picks up e^{2u(v)}.
struct ConformalFactor {
  std::vector<double> u;  // vertex id -> factor

  double operator[](VertexId v) const { return u[v]; }
  double& operator[](VertexId v) { return u[v]; }
  int vertex_count() const { return static_cast<int>(u.size()); }

  static ConformalFactor zero(int n_vertices) {
    return ConformalFactor{std::vector<double>(n_vertices, 0.0)};
  }
};

// Discrete curvature K(v) = 2*pi - (sum of corner angles at v).
struct CurvatureField {
  std::vector<double> k;  // vertex id -> curvature

  double operator[](VertexId v) const { return k[v]; }
  double& operator[](VertexId v) { return k[v]; }
  int vertex_count() const { return static_cast<int>(k.size()); }
};

// Relative triangle-inequality slack below which a triangle counts as
// degenerate: min over sides of (sum of other two - side), divided by the
// perimeter. Solver line searches keep running metrics well above this; the
// threshold only has to absorb roundoff.
inline constexpr double kDegenerateSlackTol = 1e-12;

// Angle opposite c in the triangle with side lengths (a, b, c), in (0, pi).
// The cosine argument is clamped to [-1, 1] to absorb roundoff.
// Throws NonPositiveLength, DegenerateTriangle.
double corner_angle(double a, double b, double c);

// The three corner angles of face f (indexed by corner slot).
std::array<double, 3> face_angles(const MarkedSurface& m, const PLMetric& d,
                                  FaceId f);

// Cone angle at v = sum of incident corner angles.
double vertex_cone_angle(const MarkedSurface& m, const PLMetric& d, VertexId v);

// K(v) = 2*pi - cone angle at v.
double vertex_curvature(const MarkedSurface& m, const PLMetric& d, VertexId v);

// All vertex curvatures in one sweep. Checks the Gauss-Bonnet identity
// |sum K - 2*pi*chi| <= 1e-9 and throws GaussBonnetViolation on failure;
// that failure always indicates an internal bug, never bad user input.
CurvatureField curvature_field(const MarkedSurface& m, const PLMetric& d);

// l'(e) = l(e) * e^{u(v)+u(v')}. The result may violate triangle
// inequalities; callers decide with validate_metric.
PLMetric conformal_scale(const MarkedSurface& m, const PLMetric& d,
                         const ConformalFactor& u);

// Faces violating the (strict, up to kDegenerateSlackTol) triangle
// inequality, ascending. Empty result == d is a valid metric on m.
// Throws NonPositiveLength.
std::vector<FaceId> validate_metric(const MarkedSurface& m, const PLMetric& d);

// Convenience guard: throws DegenerateTriangle naming the first bad face.
void require_valid_metric(const MarkedSurface& m, const PLMetric& d);

}  // namespace dcu
