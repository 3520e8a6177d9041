#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dcu/delaunay.hpp"
#include "dcu/metric.hpp"
#include "fixtures.hpp"

using namespace dcu;
using doctest::Approx;

TEST_CASE("corner angle against an independently computed value") {
  // Long-double law-of-cosines oracle for a nearly degenerate triangle:
  // sides 2, 2 with opposite side 3.999.
  CHECK(corner_angle(2.0, 2.0, 3.999) ==
        Approx(3.0968703622923950767).epsilon(1e-14));
  // Right triangle: the angle opposite the hypotenuse.
  CHECK(corner_angle(3.0, 4.0, 5.0) == Approx(M_PI / 2).epsilon(1e-14));
  CHECK(corner_angle(1.0, 1.0, 1.0) == Approx(M_PI / 3).epsilon(1e-14));
}

TEST_CASE("corner angles of a face sum to pi") {
  std::mt19937_64 rng(11);
  fixtures::Mesh t = fixtures::tetrahedron();
  for (int i = 0; i < 50; i++) {
    PLMetric d = fixtures::random_valid_metric(t.surface, rng, 0.4);
    for (FaceId f = 0; f < t.surface.face_count(); f++) {
      auto a = face_angles(t.surface, d, f);
      CHECK(a[0] + a[1] + a[2] == Approx(M_PI).epsilon(1e-12));
    }
  }
}

TEST_CASE("degenerate triangles are rejected with a tolerance band") {
  CHECK_THROWS_AS(corner_angle(1.0, 1.0, 2.0), Error);
  CHECK_THROWS_AS(corner_angle(1.0, 1.0, 2.5), Error);  // violated outright
  CHECK_THROWS_AS(corner_angle(1.0, 2.0, 1.0 + 1e-14), Error);  // inside band
  CHECK_NOTHROW(corner_angle(1.0, 1.0, 1.999));
  try {
    corner_angle(0.3, 0.1, 0.5);
    FAIL("expected DegenerateTriangle");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::DegenerateTriangle);
  }
  CHECK_THROWS_AS(corner_angle(-1.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(corner_angle(0.0, 1.0, 1.0), Error);
}

TEST_CASE("regular tetrahedron curvature is pi at every vertex") {
  fixtures::Mesh t = fixtures::tetrahedron();
  CurvatureField k = curvature_field(t.surface, t.metric);
  for (VertexId v = 0; v < 4; v++) CHECK(k[v] == Approx(M_PI).epsilon(1e-14));
}

TEST_CASE("flat fixtures have zero curvature") {
  fixtures::Mesh g = fixtures::grid_torus(4, 5);
  CurvatureField k = curvature_field(g.surface, g.metric);
  for (VertexId v = 0; v < g.surface.vertex_count(); v++)
    CHECK(std::abs(k[v]) < 1e-12);

  fixtures::Mesh t = fixtures::one_vertex_torus(1, 1, 1);
  CHECK(std::abs(curvature_field(t.surface, t.metric)[0]) < 1e-12);
}

TEST_CASE("curvature sums to 2 pi chi on every fixture") {
  std::mt19937_64 rng(3);
  for (const auto& mesh : fixtures::standard_meshes()) {
    for (int i = 0; i < 5; i++) {
      PLMetric d = fixtures::random_valid_metric(mesh.surface, rng);
      CurvatureField k = curvature_field(mesh.surface, d);
      double sum = 0.0;
      for (VertexId v = 0; v < mesh.surface.vertex_count(); v++) sum += k[v];
      CHECK(std::abs(sum - 2.0 * M_PI * mesh.surface.euler_characteristic()) <
            1e-9);
    }
  }
}

TEST_CASE("genus-2 octagon fan concentrates curvature -4 pi") {
  fixtures::Mesh g = fixtures::genus2_octagon();
  CHECK(curvature_field(g.surface, g.metric)[0] ==
        Approx(-4.0 * M_PI).epsilon(1e-12));
  // Midpoint refinement is isometric: new vertices are flat, the old one
  // keeps its cone angle.
  fixtures::Mesh fine = fixtures::subdivide(g);
  CurvatureField k = curvature_field(fine.surface, fine.metric);
  CHECK(k[0] == Approx(-4.0 * M_PI).epsilon(1e-12));
  for (VertexId v = 1; v < fine.surface.vertex_count(); v++)
    CHECK(std::abs(k[v]) < 1e-12);
}

TEST_CASE("conformal scaling multiplies lengths by both endpoint factors") {
  fixtures::Mesh t = fixtures::tetrahedron();
  std::vector<double> u = {0.1, -0.2, 0.05, 0.0};
  PLMetric scaled = conformal_scale(t.surface, t.metric, ConformalFactor{u});
  for (EdgeId e = 0; e < t.surface.edge_count(); e++) {
    auto ab = t.surface.endpoints(e);
    CHECK(scaled[e] ==
          Approx(t.metric[e] * std::exp(u[ab[0]] + u[ab[1]])).epsilon(1e-15));
  }
  // A constant factor c scales every length by e^{2c}.
  PLMetric uniform = conformal_scale(t.surface, t.metric,
                                     ConformalFactor{{0.3, 0.3, 0.3, 0.3}});
  for (EdgeId e = 0; e < 6; e++)
    CHECK(uniform[e] == Approx(std::exp(0.6)).epsilon(1e-15));
}

TEST_CASE("validate_metric names the broken faces") {
  fixtures::Mesh t = fixtures::tetrahedron();
  CHECK(validate_metric(t.surface, t.metric).empty());
  PLMetric bad = t.metric;
  bad[0] = 2.5;  // face 0 = (edges 0,1,2) with lengths (2.5,1,1) degenerates
  auto faces = validate_metric(t.surface, bad);
  CHECK(!faces.empty());
  for (FaceId f : faces) {
    const auto& e = t.surface.face(f).e;
    CHECK((e[0] == 0 || e[1] == 0 || e[2] == 0));
  }
  PLMetric negative = t.metric;
  negative[3] = -1.0;
  CHECK_THROWS_AS(validate_metric(t.surface, negative), Error);
}

TEST_CASE("Delaunay margin matches the opposite-angle criterion") {
  std::mt19937_64 rng(17);
  fixtures::Mesh t = fixtures::tetrahedron();
  int checked = 0;
  for (int i = 0; i < 200; i++) {
    PLMetric d = fixtures::random_valid_metric(t.surface, rng, 0.5);
    for (EdgeId e = 0; e < t.surface.edge_count(); e++) {
      EdgeQuad q = edge_quad(t.surface, d, e);
      double margin = delaunay_margin(q.x0, q.x1, q.x2, q.x3, q.x4);
      CHECK(margin == Approx(delaunay_margin(t.surface, d, e)).epsilon(1e-14));
      double angle_sum = corner_angle(q.x1, q.x2, q.x0) +
                         corner_angle(q.x3, q.x4, q.x0);
      if (std::abs(angle_sum - M_PI) < 1e-9) continue;  // too close to call
      CHECK((margin > 0) == (angle_sum < M_PI));
      checked++;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("flat grid torus is Delaunay with cocircular diagonals") {
  fixtures::Mesh g = fixtures::grid_torus(4, 4);
  int cocircular = 0;
  for (EdgeId e = 0; e < g.surface.edge_count(); e++) {
    DelaunayClass c = is_delaunay_edge(g.surface, g.metric, e);
    CHECK(c != DelaunayClass::Violated);
    if (c == DelaunayClass::Cocircular) cocircular++;
  }
  // Each unit square's corners are concyclic, so exactly the nm diagonals
  // sit on cocircular walls; axis edges are strict.
  CHECK(cocircular == 16);
}

TEST_CASE("self-glued edges are always strictly Delaunay") {
  fixtures::Mesh dt = fixtures::double_triangle(1, 1.1, 0.9);
  MarkedSurface m = dt.surface;
  PLMetric d = dt.metric;
  double diag = flip_edge(m, d, 0);
  CHECK(diag > 0);
  CHECK(m.is_self_glued(1));
  CHECK(is_delaunay_edge(m, d, 1) == DelaunayClass::StrictlyDelaunay);
  CHECK(is_delaunay_edge(m, d, 2) == DelaunayClass::StrictlyDelaunay);
}

TEST_CASE("planar diagonal length against an embedding oracle") {
  // Quad with diagonal a=2, apexes at distances (y,x)=(1.5,2) and
  // (z,w)=(1.7,1.1); the independently embedded cross-diagonal length.
  CHECK(diagonal_length(2.0, 1.5, 1.7, 1.1, 2.0) ==
        Approx(2.4782806388425311922).epsilon(1e-14));
}

TEST_CASE("non-crossing quads cannot be flipped") {
  // Both apexes huddle near the same diagonal endpoint: the cross diagonal
  // misses the edge, so the flip must refuse.
  CHECK_THROWS_AS(diagonal_length(2.05, 0.1, 0.1, 2.05, 2.0), Error);
  try {
    diagonal_length(2.05, 0.1, 0.1, 2.05, 2.0);
    FAIL("expected NonConvexQuad");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NonConvexQuad);
  }
}

TEST_CASE("Ptolemy length equals the planar diagonal exactly when inscribed") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; i++) {
    // Four points on a circle in cyclic order p, d, q, c.
    double r = 0.5 + 1.5 * unit(rng);
    double th[4];
    for (double& t : th) t = 2.0 * M_PI * unit(rng);
    std::sort(th, th + 4);
    if (th[1] - th[0] < 0.2 || th[2] - th[1] < 0.2 || th[3] - th[2] < 0.2 ||
        th[0] + 2.0 * M_PI - th[3] < 0.2) {
      i--;
      continue;  // avoid degenerate slivers
    }
    auto chord = [&](double a, double b) {
      return 2.0 * r * std::abs(std::sin((b - a) / 2.0));
    };
    double p = th[0], dd = th[1], q = th[2], c = th[3];
    double a = chord(p, q);
    double x1 = chord(q, c), x2 = chord(c, p), x3 = chord(p, dd),
           x4 = chord(dd, q);
    double other = chord(c, dd);
    CHECK(ptolemy_length(x1, x2, x3, x4, a) == Approx(other).epsilon(1e-10));
    CHECK(diagonal_length(x1, x2, x3, x4, a) == Approx(other).epsilon(1e-9));
  }
}

TEST_CASE("flipping preserves cone angles") {
  std::mt19937_64 rng(31);
  fixtures::Mesh t = fixtures::tetrahedron();
  for (int i = 0; i < 100; i++) {
    PLMetric d = fixtures::random_valid_metric(t.surface, rng, 0.5);
    EdgeId worst = 0;
    double worst_margin = 1e300;
    for (EdgeId e = 0; e < t.surface.edge_count(); e++) {
      double margin = delaunay_margin(t.surface, d, e);
      if (margin < worst_margin) {
        worst_margin = margin;
        worst = e;
      }
    }
    if (worst_margin > -1e-6) continue;  // want a genuinely violated edge
    MarkedSurface m = t.surface;
    PLMetric dd = d;
    CurvatureField before = curvature_field(m, dd);
    flip_edge(m, dd, worst);
    CurvatureField after = curvature_field(m, dd);
    for (VertexId v = 0; v < 4; v++)
      CHECK(after[v] == Approx(before[v]).epsilon(1e-10));
  }
}

TEST_CASE("make_delaunay repairs and certifies every fixture") {
  std::mt19937_64 rng(37);
  for (const auto& mesh : fixtures::standard_meshes()) {
    for (int i = 0; i < 10; i++) {
      PLMetric d = fixtures::random_valid_metric(mesh.surface, rng);
      MarkedSurface m = mesh.surface;
      PLMetric repaired = d;
      CurvatureField before = curvature_field(m, repaired);
      FlipLog log = make_delaunay(m, repaired);
      for (EdgeId e = 0; e < m.edge_count(); e++)
        CHECK(is_delaunay_edge(m, repaired, e) != DelaunayClass::Violated);
      CurvatureField after = curvature_field(m, repaired);
      for (VertexId v = 0; v < m.vertex_count(); v++)
        CHECK(after[v] == Approx(before[v]).epsilon(1e-9));
      for (const FlipRecord& rec : log.entries) {
        CHECK(rec.old_length > 0);
        CHECK(rec.new_length > 0);
      }
    }
  }
}

TEST_CASE("make_delaunay is deterministic") {
  std::mt19937_64 rng(41);
  fixtures::Mesh g = fixtures::grid_torus(4, 4);
  PLMetric d = fixtures::random_valid_metric(g.surface, rng, 0.4);

  MarkedSurface m1 = g.surface;
  PLMetric d1 = d;
  FlipLog log1 = make_delaunay(m1, d1);

  MarkedSurface m2 = g.surface;
  PLMetric d2 = d;
  FlipLog log2 = make_delaunay(m2, d2);

  REQUIRE(log1.count() == log2.count());
  for (int i = 0; i < log1.count(); i++)
    CHECK(log1.entries[i].e == log2.entries[i].e);
  CHECK(m1 == m2);
  for (EdgeId e = 0; e < m1.edge_count(); e++) CHECK(d1[e] == d2[e]);
}

TEST_CASE("skewed one-vertex torus needs exactly one flip") {
  fixtures::Mesh t = fixtures::one_vertex_torus(1, 1.05, 1.7);
  MarkedSurface m = t.surface;
  PLMetric d = t.metric;
  FlipLog log = make_delaunay(m, d);
  CHECK(log.count() == 1);
  CHECK(log.entries[0].e == 2);
  for (EdgeId e = 0; e < 3; e++)
    CHECK(is_delaunay_edge(m, d, e) != DelaunayClass::Violated);
}
