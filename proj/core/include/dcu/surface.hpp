#pragma once

#include <array>
#include <vector>

#include "dcu/errors.hpp"

namespace dcu {

using VertexId = int;
using EdgeId = int;
using FaceId = int;
// Halfedge h = 3*f + k is side k of face f, running from corner k to corner k+1.
using HalfedgeId = int;

// One triangle of the gluing pattern. Side k runs v[k] -> v[(k+1)%3] and
// carries the edge id e[k]; two sides sharing an id are glued to each other.
struct FaceSpec {
  std::array<VertexId, 3> v;
  std::array<EdgeId, 3> e;

  bool operator==(const FaceSpec& other) const = default;
};

// The two triangles around an edge, unfolded. h runs p -> q with apex c; the
// other side ht has apex d. s1..s4 walk the quad boundary q->c, c->p, p->d,
// d->q, so that (|s1|,|s2|) are the sides facing e in its own triangle and
// (|s3|,|s4|) the ones in the other. When the edge is self-glued (both sides
// on one face) the "quad" degenerates and only the side roles stay meaningful.
struct QuadLayout {
  EdgeId e = -1;
  HalfedgeId h = -1, ht = -1;  // the two sides of e; h is the smaller id
  bool self_glued = false;     // face_of(h) == face_of(ht)
  bool parallel = false;       // sides traverse the shared geodesic in the same direction
  VertexId p = -1, q = -1, c = -1, d = -1;
  HalfedgeId s1 = -1, s2 = -1, s3 = -1, s4 = -1;
};

// A closed triangulated surface with marked (= all) vertices, stored as a
// delta complex: faces glued along explicitly identified edge sides. Loops,
// multi-edges and doubly-incident (self-glued) edges are all legal, which is
// what Delaunay triangulations of small marked surfaces require.
class MarkedSurface {
 public:
  // Validates and builds. Edge ids must be dense (0..E-1), each used by
  // exactly two sides whose endpoint labels match as unordered pairs.
  // Throws: NonManifold, Disconnected, EulerObstruction, InvalidGluing.
  static MarkedSurface build(int n_vertices, std::vector<FaceSpec> faces);

  int vertex_count() const { return n_vertices_; }
  int edge_count() const { return static_cast<int>(edge_sides_.size()); }
  int face_count() const { return static_cast<int>(faces_.size()); }
  int halfedge_count() const { return 3 * face_count(); }
  int euler_characteristic() const {
    return n_vertices_ - edge_count() + face_count();
  }

  static FaceId face_of(HalfedgeId h) { return h / 3; }
  static int slot_of(HalfedgeId h) { return h % 3; }
  static HalfedgeId halfedge(FaceId f, int slot) { return 3 * f + slot; }
  static HalfedgeId next(HalfedgeId h) { return 3 * (h / 3) + (h % 3 + 1) % 3; }
  static HalfedgeId prev(HalfedgeId h) { return 3 * (h / 3) + (h % 3 + 2) % 3; }

  VertexId origin(HalfedgeId h) const { return faces_[h / 3].v[h % 3]; }
  VertexId dest(HalfedgeId h) const { return faces_[h / 3].v[(h % 3 + 1) % 3]; }
  EdgeId edge_of(HalfedgeId h) const { return faces_[h / 3].e[h % 3]; }
  HalfedgeId twin(HalfedgeId h) const {
    const auto& s = edge_sides_[edge_of(h)];
    return s[0] == h ? s[1] : s[0];
  }

  const FaceSpec& face(FaceId f) const { return faces_[f]; }
  const std::vector<FaceSpec>& faces() const { return faces_; }
  // The two sides of e, ascending by halfedge id.
  const std::array<HalfedgeId, 2>& sides_of(EdgeId e) const {
    return edge_sides_[e];
  }
  std::array<VertexId, 2> endpoints(EdgeId e) const {
    HalfedgeId h = edge_sides_[e][0];
    return {origin(h), dest(h)};
  }
  bool is_loop(EdgeId e) const {
    auto ab = endpoints(e);
    return ab[0] == ab[1];
  }
  bool is_self_glued(EdgeId e) const {
    const auto& s = edge_sides_[e];
    return face_of(s[0]) == face_of(s[1]);
  }
  bool is_parallel_glued(EdgeId e) const { return parallel_[e] != 0; }

  QuadLayout quad_layout(EdgeId e) const;

  // Replaces e by the cross diagonal c--d of its quad: the two faces become
  // (c,p,d) and (d,q,c) and e's endpoints change while its id survives.
  // Purely combinatorial; callers are responsible for the new length.
  // Throws UnflippableEdge when both sides of e lie in one face.
  void flip(EdgeId e);

  bool operator==(const MarkedSurface& other) const = default;

  // Empty placeholder (no vertices, no faces); build() is the validated way
  // to make a usable surface.
  MarkedSurface() = default;

 private:
  int n_vertices_ = 0;
  std::vector<FaceSpec> faces_;
  std::vector<std::array<HalfedgeId, 2>> edge_sides_;
  std::vector<char> parallel_;
};

}  // namespace dcu
