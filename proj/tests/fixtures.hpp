#pragma once

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dcu/metric.hpp"
#include "dcu/surface.hpp"

namespace dcu::fixtures {

struct Mesh {
  MarkedSurface surface;
  PLMetric metric;
};

// Builds a simplicial closed surface, assigning edge ids to unordered vertex
// pairs in first-appearance order. Asserts every pair is used exactly twice
// with opposite orientations (consistent winding); not for complexes with
// loops or multi-edges.
MarkedSurface surface_from_triangles(int n_vertices,
                                     const std::vector<std::array<int, 3>>& tris);

Mesh tetrahedron();  // regular, unit edge lengths
Mesh tetrahedron(const std::array<double, 6>& lengths);
// Two faces sharing all three edges (sphere); lengths indexed by edge id.
Mesh double_triangle(double l0, double l1, double l2);
// One vertex, two faces, three loop edges (torus).
Mesh one_vertex_torus(double l0, double l1, double l2);
// Flat n x m diagonal grid torus (n, m >= 3), unit cells.
Mesh grid_torus(int n, int m);
Mesh octahedron();
Mesh icosahedron();
// One-vertex genus-2 surface: fan-triangulated octagon with sides glued by
// the orientable two-handle pattern; metric = the regular planar octagon fan.
Mesh genus2_octagon();
// Isometric midpoint refinement: every face into four, every edge midpoint
// becomes a flat (K = 0) vertex.
Mesh subdivide(const Mesh& in);

// One representative metric per topology used in randomized sweeps.
std::vector<Mesh> standard_meshes();

// Random lengths exp(U(-spread, spread)) resampled until the metric is
// valid; shrinks spread automatically if acceptance is poor.
PLMetric random_valid_metric(const MarkedSurface& m, std::mt19937_64& rng,
                             double spread = 0.3);

// Random lengths accepted purely on the Delaunay inequality at every edge
// (validity NOT checked - that implication is what callers test). Returns
// nullopt when max_tries rejections run out.
std::optional<std::vector<double>> random_delaunay_lengths(
    const MarkedSurface& m, std::mt19937_64& rng, double spread,
    int max_tries);

// Valid + strictly Delaunay metric (margin >= min_margin at every edge).
PLMetric random_delaunay_metric(const MarkedSurface& m, std::mt19937_64& rng,
                                double spread = 0.2, double min_margin = 0.0);

// Target curvatures < 2pi summing to 2*pi*chi exactly.
std::vector<double> random_admissible_target(const MarkedSurface& m,
                                             std::mt19937_64& rng);

// A metric conformally equivalent to d on the same surface by construction:
// flip to Delaunay (isometric), scale by u there, flip back (isometric).
// Returns nullopt when a flip-back quad is non-convex or the scaled metric
// is invalid; callers retry with smaller u.
std::optional<PLMetric> scaled_flip_variant(const MarkedSurface& m,
                                            const PLMetric& d,
                                            const std::vector<double>& u);

}  // namespace dcu::fixtures
