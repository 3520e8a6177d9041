#pragma once

#include <cmath>
#include <vector>

#include "dcu/delaunay.hpp"
#include "dcu/metric.hpp"
#include "dcu/surface.hpp"

namespace dcu {

// Decorated ideal hyperbolic structure in Penner coordinates: one positive
// lambda-length per edge of a triangulation. Any positive vector is
// admissible (every positive triple is realized by a unique decorated ideal
// triangle), which is what makes this the right chart for conformal scaling:
// scaled lambdas never leave the domain, unlike Euclidean lengths.
struct DecoratedMetric {
  MarkedSurface surface;
  std::vector<double> lambda;  // edge id -> lambda-length

  // Hyperbolic distance between the two horocycles along edge e.
  double hyp_length(EdgeId e) const { return 2.0 * std::log(lambda[e]); }
};

// Horocyclic arc length cut off at the corner facing edge i by the
// decoration: a_i = L_i / (L_j * L_k). These are lengths, not radians, and
// may exceed pi.
double penner_angle(double li, double lj, double lk);

// Horocycle length w(v) = sum of the decorated angles at v's corners.
std::vector<double> horocycle_lengths(const DecoratedMetric& dm);

// Chart identity: a Euclidean-Delaunay PL metric and its decorated
// hyperbolic image share the same coordinate vector, so this is a domain
// check plus a copy. Throws NotDelaunay when some edge is violated.
DecoratedMetric pl_to_decorated(const MarkedSurface& m, const PLMetric& d);

// Margin of the hyperbolic Delaunay inequality at an edge with quad lambdas
// (x0; x1..x4): (x1/x2 + x2/x1 + x3/x4 + x4/x3) - x0^2/(x1 x2) - x0^2/(x3 x4).
// Nonnegative iff Delaunay; algebraically equal to 2 * the Euclidean margin,
// so the two predicates classify identically.
double hyperbolic_delaunay_margin(double x0, double x1, double x2, double x3,
                                  double x4);
double hyperbolic_delaunay_margin(const DecoratedMetric& dm, EdgeId e);

DelaunayClass hyperbolic_delaunay_edge(const DecoratedMetric& dm, EdgeId e);

// Diagonal switch in lambda coordinates: new lambda(e) =
// (l1*l3 + l2*l4)/l0, other lambdas unchanged. This is a transition map
// between charts of one decorated structure — nothing geometric moves.
// Flipping the same edge twice restores lambda(e) (involution).
// Throws UnflippableEdge for self-glued edges.
void ptolemy_flip(DecoratedMetric& dm, EdgeId e);

// lambda'(e) = lambda(e) * e^{u(v)+u(v')}. Horocycle lengths respond by
// w'(v) = w(v) * e^{-2u(v)}; the underlying hyperbolic structure is fixed.
DecoratedMetric conformal_scale_lambda(const DecoratedMetric& dm,
                                       const ConformalFactor& u);

// Flips hyperbolically violated edges (same deterministic queue discipline
// as the Euclidean make_delaunay) using Ptolemy length updates. Because the
// flips are chart transitions, the decorated structure is preserved exactly;
// afterwards the lambda vector is also a valid Euclidean Delaunay metric
// (Delaunay implies the triangle inequalities). Any positive vector is
// admissible input. Throws FlipBudgetExceeded under the same budget rule.
FlipLog hyperbolic_make_delaunay(DecoratedMetric& dm);

// Cross-ratio (l1*l3)/(l2*l4) of the quad around e: invariant under
// conformal scaling (the e^u factors cancel), so the shear vector
// characterizes the underlying hyperbolic structure on a fixed
// triangulation and certifies conformal-class membership.
double edge_shear(const DecoratedMetric& dm, EdgeId e);

// All shears, indexed by edge id.
std::vector<double> shear_vector(const DecoratedMetric& dm);

}  // namespace dcu
