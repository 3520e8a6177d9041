#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "dcu/metric.hpp"
#include "dcu/surface.hpp"

namespace dcu {

// Classification margin: |Q| at or below this counts as cocircular. Cell
// walls (alpha + alpha' = pi) are exact zeros of Q, so the band only has to
// absorb roundoff.
inline constexpr double kCocircularTol = 1e-12;

enum class DelaunayClass { StrictlyDelaunay, Cocircular, Violated };

// The metric data of the two triangles around edge e, in the cyclic order of
// the unfolded quad: x0 = |e|; x1, x2 behind the near corner (apex c); x3, x4
// behind the far corner (apex d). For a self-glued edge both corners live on
// the one incident triangle and some x_i coincide with x0.
struct EdgeQuad {
  EdgeId e = -1;
  double x0 = 0, x1 = 0, x2 = 0, x3 = 0, x4 = 0;
  double alpha = 0;        // angle facing e in its own triangle, in (0, pi)
  double alpha_prime = 0;  // angle facing e from the other side
  bool self_glued = false;
};

struct FlipRecord {
  EdgeId e;
  double old_length;
  double new_length;
  int index;  // ordinal of this flip within its surgery run
};

// Diagnostic record of a surgery run; the solver aggregates these per solve.
struct FlipLog {
  std::vector<FlipRecord> entries;
  int count() const { return static_cast<int>(entries.size()); }
};

EdgeQuad edge_quad(const MarkedSurface& m, const PLMetric& d, EdgeId e);

// Q = cos(alpha) + cos(alpha') in length form:
// (x1^2+x2^2-x0^2)/(2 x1 x2) + (x3^2+x4^2-x0^2)/(2 x3 x4).
// Q >= 0 is exactly the Delaunay condition alpha + alpha' <= pi.
double delaunay_margin(double x0, double x1, double x2, double x3, double x4);
double delaunay_margin(const MarkedSurface& m, const PLMetric& d, EdgeId e);

DelaunayClass classify_margin(double margin, double tol = kCocircularTol);

DelaunayClass is_delaunay_edge(const MarkedSurface& m, const PLMetric& d,
                               EdgeId e);

// Isometric planar layout of the two triangles around e: returns the images
// of p, q, c, d (in this order) with p = (0,0), q = (|e|, 0), c above the
// axis and d below. A self-glued edge unfolds its one triangle twice.
// Side lengths are reproduced to 1e-12 relative.
std::array<Eigen::Vector2d, 4> embed_quad(const MarkedSurface& m,
                                          const PLMetric& d, EdgeId e);

// Length of the cross diagonal of the unfolded quad with boundary (x,y,z,w)
// cyclic around diagonal a: corners q--c--p--d with |qc| = x, |cp| = y,
// |pd| = z, |dq| = w, |pq| = a. Throws NonConvexQuad when the diagonals do
// not cross, i.e. the switch is geometrically invalid (never the case at a
// Delaunay-violated edge).
double diagonal_length(double x, double y, double z, double w, double a);

// (x*z + y*w)/a. Agrees with diagonal_length exactly on the cocircular
// locus and serves as the flip rule for the decorated-hyperbolic picture.
double ptolemy_length(double x, double y, double z, double w, double a);

// Replaces e by the cross diagonal and assigns it the planar diagonal
// length, so the underlying cone metric is unchanged. Returns the new
// length. Throws UnflippableEdge (self-glued), NonConvexQuad.
double flip_edge(MarkedSurface& m, PLMetric& d, EdgeId e);

// Flips Delaunay-violated edges (work queue, re-examining the four quad
// boundary edges after each flip) until every edge is strictly Delaunay or
// cocircular. Cocircular edges are never flipped, which makes the run
// deterministic. The flip budget 50*|E|*(1+|log length-spread|) converts a
// hypothetical non-terminating run into FlipBudgetExceeded.
FlipLog make_delaunay(MarkedSurface& m, PLMetric& d);

// At a cocircular configuration the planar diagonal A and the Ptolemy
// diagonal B agree to first order. Returns the max abs difference between
// the five central-difference partials of A and the analytic gradient of B
// = (z/a, w/a, x/a, y/a, -B/a). Precondition: |A - B| <= 1e-9.
double diagonal_derivative_check(double x, double y, double z, double w,
                                 double a);

}  // namespace dcu
