#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "dcu/delaunay.hpp"
#include "dcu/metric.hpp"
#include "dcu/penner.hpp"
#include "dcu/surface.hpp"

namespace dcu {

// Prescribed curvature K*: one value per vertex, each below 2*pi, summing
// to 2*pi*chi — exactly the targets a conformal rescaling can realize.
struct CurvatureTarget {
  std::vector<double> k_star;  // vertex id -> target curvature

  double operator[](VertexId v) const { return k_star[v]; }
  int vertex_count() const { return static_cast<int>(k_star.size()); }

  // Constant target 2*pi*chi/|V| (cone metric of constant curvature).
  static CurvatureTarget uniform(const MarkedSurface& m);
  // All-zero target; only admissible when chi = 0.
  static CurvatureTarget flat(const MarkedSurface& m);

  // Throws InvalidMetric unless every entry < 2*pi and the total is
  // 2*pi*chi within 1e-9.
  void validate(const MarkedSurface& m) const;
};

struct SolverConfig {
  int max_newton_iters = 100;     // Newton iteration cap
  int max_flow_iters = 50000;     // explicit-Euler iteration cap
  double residual_tol = 1e-10;    // convergence threshold on max|K - K*|
  double armijo_c = 1e-4;         // sufficient-decrease constant
  double armijo_shrink = 0.5;     // backtracking factor
  double min_step = 1e-12;        // line search / flow step floor
  double flow_step = 0.1;         // explicit Euler step size
  long flip_budget_per_step = 0;  // 0 = automatic (length-spread rule)
  // Optional starting point (empty = zeros); noise adds a centered uniform
  // perturbation of the given amplitude, seeded for reproducibility.
  std::vector<double> initial_u;
  double initial_noise = 0.0;
  unsigned long long rng_seed = 0;
};

enum class Termination {
  Converged,
  MaxItersExceeded,
  LineSearchStalled,
  StepTooLarge,
};
const char* termination_name(Termination t);

struct SolveReport {
  Termination termination = Termination::Converged;
  int iterations = 0;
  ConformalFactor u_final;  // gauge-fixed: sum u = 0
  MarkedSurface surface;    // final triangulation (Delaunay for `metric`)
  PLMetric metric;          // final edge lengths, consistent with u_final
  // Euclidean surgery that made the *input* Delaunay (isometric, before any
  // scaling), followed by the conformal-phase Ptolemy flips in order.
  FlipLog initial_repair;
  std::vector<EdgeId> flip_sequence;
  FlipLog flip_log;  // the conformal-phase flips with lengths + step tags
  std::vector<int> flips_per_iteration;
  // One entry per accepted iterate, including the starting point. The l2
  // series is strictly decreasing by the line-search acceptance rule.
  std::vector<double> residual_max_history;
  std::vector<double> residual_l2_history;
  std::vector<EdgeId> cocircular_edges;  // walls the final metric sits on
  double wall_time_ms = 0.0;

  int total_flips() const {
    return initial_repair.count() + static_cast<int>(flip_sequence.size());
  }
};

// Solver failures carry the best iterate so callers can inspect or resume.
class SolveError : public Error {
 public:
  SolveError(ErrorCode code, const std::string& message, SolveReport best)
      : Error(code, message), report_(std::move(best)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

// Sparse Hessian of the curvature map: H[i][j] = -(cot a_ij + cot a'_ij)
// over the edges ij of a Delaunay triangulation, diagonal = negated row
// sums. Symmetric positive semidefinite with kernel spanned by the all-ones
// vector (connected + strictly Delaunay); validated against finite
// differences of curvature_map in the tests rather than trusted.
using CurvatureJacobian = Eigen::SparseMatrix<double>;

struct CurvatureMapResult {
  CurvatureField k;
  MarkedSurface surface;
  PLMetric metric;
  FlipLog flips;
};

// F(u): scale the (Delaunay) input by u in lambda coordinates and restore
// Delaunay by Ptolemy flips, then read off vertex curvatures. The flips are
// chart transitions of the decorated structure, so the output stays in the
// input's conformal class exactly; constant shifts of u change only the
// scale (F(u + c) = F(u)). Throws MetricDegenerate when scaling overflows,
// NotDelaunay when the input metric is not Delaunay.
CurvatureMapResult curvature_map(const MarkedSurface& m, const PLMetric& d,
                                 const ConformalFactor& u);

CurvatureJacobian curvature_jacobian(const MarkedSurface& m, const PLMetric& d);

// Max |J_ij - J_ji| over a central-difference Jacobian of curvature_map at
// u. Meaningful in the interior of a Delaunay cell (no cocircular edges).
double jacobian_symmetry_check(const MarkedSurface& m, const PLMetric& d,
                               const ConformalFactor& u, double fd_step = 1e-4);

// Newton descent on the convex energy whose gradient is K - K*: solves
// H delta = -(K - K*) on the sum-zero hyperplane, backtracks on
// 1/2 ||K - K*||_2^2, and restores Delaunay after each accepted step.
// Throws MaxItersExceeded / LineSearchStalled as SolveError with the best
// iterate attached.
SolveReport newton_uniformize(const MarkedSurface& m, const PLMetric& d,
                              const CurvatureTarget& target,
                              const SolverConfig& cfg = {});

// Explicit-Euler integration of u' = K* - K (the energy-decreasing
// direction; the first step verifies the descent numerically) with Delaunay
// restoration after every step and step halving whenever ||K - K*||_2 would
// increase. Throws StepTooLarge / MaxItersExceeded as SolveError.
SolveReport yamabe_flow(const MarkedSurface& m, const PLMetric& d,
                        const CurvatureTarget& target,
                        const SolverConfig& cfg = {});

struct EquivalenceResult {
  bool equivalent = false;
  double max_rel_diff = 0.0;
  // Witness: both uniform-curvature limits on metric A's final
  // triangulation, normalized to geometric mean 1, indexed by edge id.
  std::vector<double> normalized_a;
  std::vector<double> normalized_b;
};

// Decides discrete conformal equivalence of two metrics on one surface by
// uniformizing both to the constant target 2*pi*chi/|V| (the limit is
// unique up to scale within a class), transporting B's limit to A's final
// chart by replaying the recorded flip sequences with Ptolemy updates, and
// comparing scale-normalized lengths per edge.
EquivalenceResult conformal_equivalent(const MarkedSurface& m,
                                       const PLMetric& d_a, const PLMetric& d_b,
                                       double tol = 1e-6,
                                       const SolverConfig& cfg = {});

// The Delaunay condition is linear in delta(v) = lambda(v)^{-2} when edge
// lambdas factor as x(vv') = b(vv') / sqrt(delta(v) delta(v')): at each edge
// c3*delta(c) + c4*delta(d) <= c1*delta(p) + c2*delta(q) with coefficients
// rational in b. Returns the edges where the inequality fails for the given
// positive weights; empty iff the factored metric passes the hyperbolic
// predicate everywhere.
std::vector<EdgeId> delaunay_cell_inequalities(const MarkedSurface& m,
                                               const std::vector<double>& b,
                                               const std::vector<double>& delta);

}  // namespace dcu
