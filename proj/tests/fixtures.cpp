#include "fixtures.hpp"

#include <cassert>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include "dcu/delaunay.hpp"

namespace dcu::fixtures {

namespace {

struct Vec3 {
  double x, y, z;
};

double dist(const Vec3& a, const Vec3& b) {
  double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Shared core of surface_from_triangles that also reports the pair -> edge
// id map so callers can assign lengths.
std::vector<FaceSpec> specs_from_triangles(
    const std::vector<std::array<int, 3>>& tris,
    std::map<std::pair<int, int>, EdgeId>& ids) {
  std::map<std::pair<int, int>, int> directed;  // ordered pair -> count
  std::vector<FaceSpec> faces(tris.size());
  for (size_t f = 0; f < tris.size(); f++) {
    faces[f].v = {tris[f][0], tris[f][1], tris[f][2]};
    for (int k = 0; k < 3; k++) {
      int a = tris[f][k], b = tris[f][(k + 1) % 3];
      if (a == b) throw std::logic_error("fixture face has a repeated vertex");
      directed[{a, b}]++;
      auto [it, fresh] =
          ids.try_emplace(std::minmax(a, b), static_cast<EdgeId>(ids.size()));
      (void)fresh;
      faces[f].e[k] = it->second;
    }
  }
  for (const auto& [pair, count] : directed) {
    auto rev = directed.find({pair.second, pair.first});
    if (count != 1 || rev == directed.end() || rev->second != 1)
      throw std::logic_error("fixture winding is inconsistent");
  }
  return faces;
}

Mesh mesh_from_embedding(const std::vector<Vec3>& pts,
                         const std::vector<std::array<int, 3>>& tris) {
  std::map<std::pair<int, int>, EdgeId> ids;
  std::vector<FaceSpec> faces = specs_from_triangles(tris, ids);
  MarkedSurface m =
      MarkedSurface::build(static_cast<int>(pts.size()), std::move(faces));
  std::vector<double> lengths(m.edge_count());
  for (const auto& [pair, e] : ids)
    lengths[e] = dist(pts[pair.first], pts[pair.second]);
  return Mesh{std::move(m), PLMetric{std::move(lengths)}};
}

}  // namespace

MarkedSurface surface_from_triangles(
    int n_vertices, const std::vector<std::array<int, 3>>& tris) {
  std::map<std::pair<int, int>, EdgeId> ids;
  std::vector<FaceSpec> faces = specs_from_triangles(tris, ids);
  return MarkedSurface::build(n_vertices, std::move(faces));
}

Mesh tetrahedron() { return tetrahedron({1, 1, 1, 1, 1, 1}); }

Mesh tetrahedron(const std::array<double, 6>& lengths) {
  MarkedSurface m = surface_from_triangles(
      4, {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}});
  // Edge ids in first-appearance order: 01, 12, 20, 23, 30, 31.
  return Mesh{std::move(m),
              PLMetric{std::vector<double>(lengths.begin(), lengths.end())}};
}

Mesh double_triangle(double l0, double l1, double l2) {
  std::vector<FaceSpec> faces(2);
  faces[0] = FaceSpec{{0, 1, 2}, {0, 1, 2}};
  faces[1] = FaceSpec{{2, 1, 0}, {1, 0, 2}};
  MarkedSurface m = MarkedSurface::build(3, std::move(faces));
  return Mesh{std::move(m), PLMetric{{l0, l1, l2}}};
}

Mesh one_vertex_torus(double l0, double l1, double l2) {
  std::vector<FaceSpec> faces(2);
  faces[0] = FaceSpec{{0, 0, 0}, {0, 1, 2}};
  faces[1] = FaceSpec{{0, 0, 0}, {0, 1, 2}};
  MarkedSurface m = MarkedSurface::build(1, std::move(faces));
  return Mesh{std::move(m), PLMetric{{l0, l1, l2}}};
}

Mesh grid_torus(int n, int m) {
  assert(n >= 3 && m >= 3);
  auto vid = [&](int i, int j) { return ((i + n) % n) + n * ((j + m) % m); };
  std::vector<std::array<int, 3>> tris;
  std::map<std::pair<int, int>, double> pair_len;
  auto side = [&](int va, int vb, double len) {
    pair_len[std::minmax(va, vb)] = len;
  };
  const double diag = std::sqrt(2.0);
  for (int j = 0; j < m; j++) {
    for (int i = 0; i < n; i++) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i, j + 1),
          d = vid(i + 1, j + 1);
      tris.push_back({a, b, d});
      tris.push_back({a, d, c});
      side(a, b, 1.0);
      side(b, d, 1.0);
      side(a, d, diag);
      side(d, c, 1.0);
      side(c, a, 1.0);
    }
  }
  std::map<std::pair<int, int>, EdgeId> ids;
  std::vector<FaceSpec> faces = specs_from_triangles(tris, ids);
  MarkedSurface surf = MarkedSurface::build(n * m, std::move(faces));
  std::vector<double> lengths(surf.edge_count());
  for (const auto& [pair, e] : ids) lengths[e] = pair_len.at(pair);
  return Mesh{std::move(surf), PLMetric{std::move(lengths)}};
}

Mesh octahedron() {
  std::vector<Vec3> pts = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                           {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
  std::vector<std::array<int, 3>> tris = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4},
                                          {3, 0, 4}, {2, 0, 5}, {1, 2, 5},
                                          {3, 1, 5}, {0, 3, 5}};
  return mesh_from_embedding(pts, tris);
}

Mesh icosahedron() {
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> pts = {{-1, p, 0},  {1, p, 0},  {-1, -p, 0}, {1, -p, 0},
                           {0, -1, p},  {0, 1, p},  {0, -1, -p}, {0, 1, -p},
                           {p, 0, -1},  {p, 0, 1},  {-p, 0, -1}, {-p, 0, 1}};
  std::vector<std::array<int, 3>> tris = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  return mesh_from_embedding(pts, tris);
}

Mesh genus2_octagon() {
  // Octagon corners 0..7, boundary sides glued aba'b'cdc'd' (edges 0..3),
  // fan diagonals from corner 0 (edges 4..8); all corners become one vertex.
  std::vector<FaceSpec> faces(6);
  faces[0] = FaceSpec{{0, 0, 0}, {0, 1, 4}};
  faces[1] = FaceSpec{{0, 0, 0}, {4, 0, 5}};
  faces[2] = FaceSpec{{0, 0, 0}, {5, 1, 6}};
  faces[3] = FaceSpec{{0, 0, 0}, {6, 2, 7}};
  faces[4] = FaceSpec{{0, 0, 0}, {7, 3, 8}};
  faces[5] = FaceSpec{{0, 0, 0}, {8, 2, 3}};
  MarkedSurface m = MarkedSurface::build(1, std::move(faces));
  // Chord lengths of the regular unit-side octagon: the fan is a planar
  // triangulation, so the metric is valid by construction.
  const double s = std::sin(M_PI / 8.0);
  const double d2 = std::sin(2.0 * M_PI / 8.0) / s;
  const double d3 = std::sin(3.0 * M_PI / 8.0) / s;
  const double d4 = 1.0 / s;
  return Mesh{std::move(m), PLMetric{{1, 1, 1, 1, d2, d3, d4, d3, d2}}};
}

Mesh subdivide(const Mesh& in) {
  const MarkedSurface& m = in.surface;
  const int V = m.vertex_count(), E = m.edge_count(), F = m.face_count();
  // New ids: vertex V+e = midpoint of edge e; edges 0..E-1 keep their id for
  // the half on the origin side of the edge's first (canonical) halfedge,
  // E..2E-1 are the other halves, 2E+3f+k the midsegment opposite side k.
  auto origin_half = [&](HalfedgeId h) -> EdgeId {
    EdgeId e = m.edge_of(h);
    bool canonical = m.sides_of(e)[0] == h;
    if (canonical || m.is_parallel_glued(e)) return e;
    return E + e;
  };
  auto dest_half = [&](HalfedgeId h) -> EdgeId {
    EdgeId e = m.edge_of(h);
    return origin_half(h) == e ? E + e : e;
  };
  std::vector<FaceSpec> faces;
  faces.reserve(4 * F);
  std::vector<double> lengths(2 * E + 3 * F);
  for (EdgeId e = 0; e < E; e++)
    lengths[e] = lengths[E + e] = in.metric[e] / 2.0;
  for (FaceId f = 0; f < F; f++) {
    const FaceSpec& spec = m.face(f);
    auto mid = [&](int k) { return V + spec.e[k]; };
    auto inner = [&](int k) { return 2 * E + 3 * f + k; };
    auto h = [&](int k) { return MarkedSurface::halfedge(f, k); };
    for (int k = 0; k < 3; k++) lengths[inner(k)] = in.metric[spec.e[k]] / 2.0;
    // Corner triangle at vertex k: (v_k, mid k, mid k-1); its middle side is
    // the midsegment parallel to side k+1.
    for (int k = 0; k < 3; k++) {
      int prev = (k + 2) % 3, next = (k + 1) % 3;
      faces.push_back(FaceSpec{
          {spec.v[k], mid(k), mid(prev)},
          {origin_half(h(k)), inner(next), dest_half(h(prev))}});
    }
    faces.push_back(FaceSpec{{mid(0), mid(1), mid(2)},
                             {inner(2), inner(0), inner(1)}});
  }
  MarkedSurface out = MarkedSurface::build(V + E, std::move(faces));
  return Mesh{std::move(out), PLMetric{std::move(lengths)}};
}

std::vector<Mesh> standard_meshes() {
  std::vector<Mesh> out;
  out.push_back(tetrahedron());
  out.push_back(double_triangle(3, 4, 5));
  out.push_back(octahedron());
  out.push_back(icosahedron());
  out.push_back(one_vertex_torus(1, 1, 1));
  out.push_back(grid_torus(4, 4));
  out.push_back(genus2_octagon());
  out.push_back(subdivide(genus2_octagon()));
  return out;
}

PLMetric random_valid_metric(const MarkedSurface& m, std::mt19937_64& rng,
                             double spread) {
  std::vector<double> lengths(m.edge_count());
  for (int tries = 0;; tries++) {
    std::uniform_real_distribution<double> logl(-spread, spread);
    for (double& l : lengths) l = std::exp(logl(rng));
    PLMetric d{lengths};
    if (validate_metric(m, d).empty()) return d;
    if (tries > 0 && tries % 200 == 0) spread *= 0.5;
  }
}

std::optional<std::vector<double>> random_delaunay_lengths(
    const MarkedSurface& m, std::mt19937_64& rng, double spread,
    int max_tries) {
  std::vector<double> lengths(m.edge_count());
  std::uniform_real_distribution<double> logl(-spread, spread);
  for (int t = 0; t < max_tries; t++) {
    for (double& l : lengths) l = std::exp(logl(rng));
    PLMetric d{lengths};
    bool ok = true;
    for (EdgeId e = 0; ok && e < m.edge_count(); e++)
      ok = delaunay_margin(m, d, e) >= 0.0;
    if (ok) return lengths;
  }
  return std::nullopt;
}

PLMetric random_delaunay_metric(const MarkedSurface& m, std::mt19937_64& rng,
                                double spread, double min_margin) {
  for (;;) {
    PLMetric d = random_valid_metric(m, rng, spread);
    bool ok = true;
    for (EdgeId e = 0; ok && e < m.edge_count(); e++)
      ok = delaunay_margin(m, d, e) >= min_margin;
    if (ok) return d;
    spread *= 0.95;
  }
}

std::vector<double> random_admissible_target(const MarkedSurface& m,
                                             std::mt19937_64& rng) {
  const int n = m.vertex_count();
  const double total = 2.0 * M_PI * m.euler_characteristic();
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::vector<double> k(n);
  for (;;) {
    double sum = 0.0;
    for (double& w : k) sum += (w = weight(rng));
    double worst = 0.0;
    for (double& w : k) worst = std::max(worst, w = total * w / sum);
    // Fix the sum exactly (the division leaves rounding dust).
    double drift = -total;
    for (double w : k) drift += w;
    k[0] -= drift;
    if (worst < 2.0 * M_PI - 1e-6 && k[0] < 2.0 * M_PI - 1e-6) return k;
  }
}

std::optional<PLMetric> scaled_flip_variant(const MarkedSurface& m,
                                            const PLMetric& d,
                                            const std::vector<double>& u) {
  MarkedSurface ms = m;
  PLMetric ds = d;
  FlipLog log = make_delaunay(ms, ds);
  PLMetric scaled = conformal_scale(ms, ds, ConformalFactor{u});
  if (!validate_metric(ms, scaled).empty()) return std::nullopt;
  try {
    for (auto it = log.entries.rbegin(); it != log.entries.rend(); ++it)
      flip_edge(ms, scaled, it->e);
  } catch (const Error&) {
    return std::nullopt;  // a flip-back quad went non-convex; caller retries
  }
  if (!validate_metric(m, scaled).empty()) return std::nullopt;
  return scaled;
}

}  // namespace dcu::fixtures
