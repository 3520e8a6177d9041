#include "dcu/surface.hpp"

#include <algorithm>
#include <cassert>
#include <string>
#include <vector>

namespace dcu {

namespace {

struct UnionFind {
  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; i++) parent[i] = i;
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
  std::vector<int> parent;
};

}  // namespace

MarkedSurface MarkedSurface::build(int n_vertices, std::vector<FaceSpec> faces) {
  if (n_vertices <= 0)
    throw Error(ErrorCode::NonManifold, "surface needs at least one vertex");
  if (faces.empty())
    throw Error(ErrorCode::NonManifold, "surface needs at least one face");

  const int nf = static_cast<int>(faces.size());
  EdgeId max_edge = -1;
  for (int f = 0; f < nf; f++) {
    for (int k = 0; k < 3; k++) {
      VertexId v = faces[f].v[k];
      if (v < 0 || v >= n_vertices)
        throw Error(ErrorCode::InvalidGluing,
                    "face " + std::to_string(f) + " references vertex " +
                        std::to_string(v) + " out of range");
      if (faces[f].e[k] < 0)
        throw Error(ErrorCode::InvalidGluing,
                    "face " + std::to_string(f) + " has a negative edge id");
      max_edge = std::max(max_edge, faces[f].e[k]);
    }
  }
  const int ne = max_edge + 1;

  // Each edge id names one gluing: exactly two sides anywhere in the complex.
  std::vector<std::vector<HalfedgeId>> sides(ne);
  for (int f = 0; f < nf; f++)
    for (int k = 0; k < 3; k++) sides[faces[f].e[k]].push_back(3 * f + k);

  MarkedSurface m;
  m.n_vertices_ = n_vertices;
  m.faces_ = std::move(faces);
  m.edge_sides_.resize(ne);
  m.parallel_.assign(ne, 0);
  for (EdgeId e = 0; e < ne; e++) {
    if (sides[e].size() != 2)
      throw Error(ErrorCode::NonManifold,
                  "edge id " + std::to_string(e) + " is used by " +
                      std::to_string(sides[e].size()) + " sides (expected 2)");
    m.edge_sides_[e] = {sides[e][0], sides[e][1]};
  }

  // Endpoint labels of glued sides must agree as unordered pairs; for
  // non-loops that also fixes the gluing direction. Loops keep the
  // head-to-tail default: the coarse face-list encoding cannot distinguish
  // the two directions, and no length/angle quantity depends on the choice.
  for (EdgeId e = 0; e < ne; e++) {
    HalfedgeId h0 = m.edge_sides_[e][0], h1 = m.edge_sides_[e][1];
    VertexId a0 = m.origin(h0), b0 = m.dest(h0);
    VertexId a1 = m.origin(h1), b1 = m.dest(h1);
    bool anti = (a0 == b1 && b0 == a1);
    bool para = (a0 == a1 && b0 == b1);
    if (!anti && !para)
      throw Error(ErrorCode::InvalidGluing,
                  "edge id " + std::to_string(e) +
                      " glues sides with mismatched endpoint labels");
    m.parallel_[e] = (para && !anti) ? 1 : 0;
  }

  // Faces must form one component under edge adjacency.
  UnionFind face_cc(nf);
  for (EdgeId e = 0; e < ne; e++)
    face_cc.unite(face_of(m.edge_sides_[e][0]), face_of(m.edge_sides_[e][1]));
  for (int f = 1; f < nf; f++)
    if (face_cc.find(f) != face_cc.find(0))
      throw Error(ErrorCode::Disconnected,
                  "face list describes more than one surface");

  // Quotient the corners by the side gluings and insist that every vertex
  // label names exactly one point of the quotient: a multi-component corner
  // class is a pinched (non-manifold) vertex, an empty one a stray label.
  // Corner k of face f sits at the origin end of side k and the dest end of
  // side k-1, so each gluing identifies two corner pairs.
  UnionFind corner_cc(3 * nf);
  for (EdgeId e = 0; e < ne; e++) {
    HalfedgeId h0 = m.edge_sides_[e][0], h1 = m.edge_sides_[e][1];
    if (m.parallel_[e]) {
      corner_cc.unite(h0, h1);              // origin end with origin end
      corner_cc.unite(next(h0), next(h1));  // dest end with dest end
    } else {
      corner_cc.unite(h0, next(h1));
      corner_cc.unite(next(h0), h1);
    }
  }
  std::vector<int> rep(n_vertices, -1);
  for (int h = 0; h < 3 * nf; h++) {
    VertexId v = m.origin(h);
    int r = corner_cc.find(h);
    if (rep[v] == -1) {
      rep[v] = r;
    } else if (rep[v] != r) {
      throw Error(ErrorCode::NonManifold,
                  "vertex " + std::to_string(v) +
                      " is pinched (its corner fan is not a single cycle)");
    }
  }
  for (VertexId v = 0; v < n_vertices; v++)
    if (rep[v] == -1)
      throw Error(ErrorCode::NonManifold,
                  "vertex " + std::to_string(v) + " appears in no face");

  // Admissible targets need chi < |V| (total curvature 2*pi*chi split into
  // per-vertex values below 2*pi). A closed triangle complex has E = 3(V-chi)
  // exactly, so this cannot fire once the gluing checks above have passed;
  // kept as a guard on the precondition anyway.
  if (m.euler_characteristic() - n_vertices >= 0)
    throw Error(ErrorCode::EulerObstruction,
                "Euler characteristic must be smaller than the vertex count");

  return m;
}

QuadLayout MarkedSurface::quad_layout(EdgeId e) const {
  QuadLayout l;
  l.e = e;
  l.h = edge_sides_[e][0];
  l.ht = edge_sides_[e][1];
  l.self_glued = face_of(l.h) == face_of(l.ht);
  l.parallel = parallel_[e] != 0;
  l.p = origin(l.h);
  l.q = dest(l.h);
  l.s1 = next(l.h);
  l.s2 = prev(l.h);
  l.c = origin(l.s2);
  // The far triangle's sides at p and at q. Head-to-head gluing walks that
  // face against its own orientation, which swaps the two.
  if (l.parallel) {
    l.s3 = prev(l.ht);
    l.s4 = next(l.ht);
  } else {
    l.s3 = next(l.ht);
    l.s4 = prev(l.ht);
  }
  l.d = origin(prev(l.ht));
  return l;
}

void MarkedSurface::flip(EdgeId e) {
  QuadLayout l = quad_layout(e);
  if (l.self_glued)
    throw Error(ErrorCode::UnflippableEdge,
                "edge " + std::to_string(e) +
                    " has both sides on one face and admits no flip");

  const FaceId f = face_of(l.h), ft = face_of(l.ht);
  const EdgeId e1 = edge_of(l.s1), e2 = edge_of(l.s2);
  const EdgeId e3 = edge_of(l.s3), e4 = edge_of(l.s4);

  EdgeId affected[5] = {e, e1, e2, e3, e4};
  std::sort(std::begin(affected), std::end(affected));
  EdgeId* aff_end = std::unique(std::begin(affected), std::end(affected));

  // Keep side records that point outside the two rewritten faces, rewrite
  // the faces, then re-scan them. Quad boundary edges may repeat, so the
  // rebuild goes through a flat list per affected id.
  std::vector<std::vector<HalfedgeId>> keep(aff_end - std::begin(affected));
  for (auto* it = std::begin(affected); it != aff_end; ++it) {
    for (HalfedgeId s : edge_sides_[*it])
      if (face_of(s) != f && face_of(s) != ft)
        keep[it - std::begin(affected)].push_back(s);
  }

  faces_[f] = FaceSpec{{l.c, l.p, l.d}, {e2, e3, e}};
  faces_[ft] = FaceSpec{{l.d, l.q, l.c}, {e4, e1, e}};

  for (FaceId g : {f, ft}) {
    for (int k = 0; k < 3; k++) {
      EdgeId id = faces_[g].e[k];
      auto* it = std::lower_bound(std::begin(affected), aff_end, id);
      if (it != aff_end && *it == id)
        keep[it - std::begin(affected)].push_back(3 * g + k);
    }
  }
  for (auto* it = std::begin(affected); it != aff_end; ++it) {
    auto& list = keep[it - std::begin(affected)];
    assert(list.size() == 2);
    std::sort(list.begin(), list.end());
    edge_sides_[*it] = {list[0], list[1]};
  }

  // Both new sides of e run between c and d head-to-tail by construction;
  // the other four gluings are untouched, so their direction flags stand.
  parallel_[e] = 0;
}

}  // namespace dcu
