#include "dcu/uniformize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

namespace dcu {

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxItersExceeded: return "max_iters_exceeded";
    case Termination::LineSearchStalled: return "line_search_stalled";
    case Termination::StepTooLarge: return "step_too_large";
  }
  return "unknown";
}

CurvatureTarget CurvatureTarget::uniform(const MarkedSurface& m) {
  double value = 2.0 * std::numbers::pi * m.euler_characteristic() /
                 m.vertex_count();
  return CurvatureTarget{std::vector<double>(m.vertex_count(), value)};
}

CurvatureTarget CurvatureTarget::flat(const MarkedSurface& m) {
  if (m.euler_characteristic() != 0)
    throw Error(ErrorCode::InvalidMetric,
                "flat target requires Euler characteristic 0, surface has " +
                    std::to_string(m.euler_characteristic()));
  return CurvatureTarget{std::vector<double>(m.vertex_count(), 0.0)};
}

void CurvatureTarget::validate(const MarkedSurface& m) const {
  if (vertex_count() != m.vertex_count())
    throw Error(ErrorCode::InvalidMetric,
                "target has " + std::to_string(vertex_count()) +
                    " entries for " + std::to_string(m.vertex_count()) +
                    " vertices");
  double total = 0.0;
  for (double k : k_star) {
    if (!(k < 2.0 * std::numbers::pi) || !std::isfinite(k))
      throw Error(ErrorCode::InvalidMetric,
                  "target curvatures must lie in (-inf, 2*pi)");
    total += k;
  }
  double expected = 2.0 * std::numbers::pi * m.euler_characteristic();
  if (std::abs(total - expected) > 1e-9)
    throw Error(ErrorCode::InvalidMetric,
                "target curvature sums to " + std::to_string(total) +
                    ", admissibility requires 2*pi*chi = " +
                    std::to_string(expected));
}

namespace {

struct Residual {
  std::vector<double> r;  // K - K*
  double l2 = 0.0;
  double max = 0.0;
};

Residual residual_of(const CurvatureField& k, const CurvatureTarget& target) {
  Residual res;
  res.r.resize(k.vertex_count());
  for (int v = 0; v < k.vertex_count(); v++) {
    res.r[v] = k[v] - target[v];
    res.l2 += res.r[v] * res.r[v];
    res.max = std::max(res.max, std::abs(res.r[v]));
  }
  res.l2 = std::sqrt(res.l2);
  return res;
}

void recenter(std::vector<double>& v) {
  double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  for (double& x : v) x -= mean;
}

// Scales lambda by e^{t(du(v)+du(v'))} per edge and restores Delaunay with
// Ptolemy flips. Unconditionally valid for any finite scaling: every
// positive lambda vector admits a (hyperbolic) Delaunay chart, and in that
// chart the vector is also a valid Euclidean metric. Only exp overflow can
// fail, which surfaces as MetricDegenerate.
FlipLog scale_and_repair(DecoratedMetric& dm, const std::vector<double>& du,
                         double t) {
  const MarkedSurface& m = dm.surface;
  for (EdgeId e = 0; e < m.edge_count(); e++) {
    auto ab = m.endpoints(e);
    dm.lambda[e] *= std::exp(t * (du[ab[0]] + du[ab[1]]));
    if (!std::isfinite(dm.lambda[e]) || dm.lambda[e] <= 0.0)
      throw Error(ErrorCode::MetricDegenerate,
                  "conformal factors overflow the metric (|u| too large)");
  }
  return hyperbolic_make_delaunay(dm);
}

CurvatureField curvature_of(const DecoratedMetric& dm) {
  PLMetric d{dm.lambda};
  return curvature_field(dm.surface, d);
}

std::vector<EdgeId> cocircular_edges_of(const DecoratedMetric& dm) {
  std::vector<EdgeId> out;
  PLMetric d{dm.lambda};
  for (EdgeId e = 0; e < dm.surface.edge_count(); e++)
    if (is_delaunay_edge(dm.surface, d, e) == DelaunayClass::Cocircular)
      out.push_back(e);
  return out;
}

// Shared mutable solver state + report bookkeeping for Newton and the flow.
struct SolverRun {
  SolverRun(const MarkedSurface& m, const PLMetric& d,
            const CurvatureTarget& target_, const SolverConfig& cfg_)
      : target(target_), cfg(cfg_), start(std::chrono::steady_clock::now()) {
    target.validate(m);
    require_valid_metric(m, d);
    rep.surface = m;
    rep.metric = d;
    rep.initial_repair = make_delaunay(rep.surface, rep.metric);
    dm = DecoratedMetric{rep.surface, rep.metric.lengths};
    u.assign(m.vertex_count(), 0.0);
    if (!cfg.initial_u.empty()) {
      if (static_cast<int>(cfg.initial_u.size()) != m.vertex_count())
        throw Error(ErrorCode::InvalidMetric,
                    "initial_u size does not match the vertex count");
      u = cfg.initial_u;
    }
    if (cfg.initial_noise > 0.0) {
      std::mt19937_64 rng(cfg.rng_seed);
      std::uniform_real_distribution<double> pert(-cfg.initial_noise,
                                                  cfg.initial_noise);
      for (double& x : u) x += pert(rng);
    }
    recenter(u);
    bool nonzero = std::any_of(u.begin(), u.end(),
                               [](double x) { return x != 0.0; });
    if (nonzero) record_flips(scale_and_repair(dm, u, 1.0));
    res = residual_of(curvature_of(dm), target);
    push_history();
  }

  void record_flips(const FlipLog& flips) {
    for (FlipRecord rec : flips.entries) {
      rep.flip_sequence.push_back(rec.e);
      rec.index = iterations;  // tag by accepted-step count, not flip ordinal
      rep.flip_log.entries.push_back(rec);
    }
  }

  void push_history() {
    rep.residual_max_history.push_back(res.max);
    rep.residual_l2_history.push_back(res.l2);
  }

  void accept(DecoratedMetric&& trial, const FlipLog& flips,
              const std::vector<double>& du, double t, Residual&& trial_res) {
    iterations++;
    record_flips(flips);
    rep.flips_per_iteration.push_back(flips.count());
    for (int v = 0; v < static_cast<int>(u.size()); v++) u[v] += t * du[v];
    dm = std::move(trial);
    res = std::move(trial_res);
    push_history();
  }

  // Gauge-fix sum(u) = 0 and rescale lengths to stay consistent with u.
  void finalize(Termination term) {
    double mean = std::accumulate(u.begin(), u.end(), 0.0) / u.size();
    for (double& x : u) x -= mean;
    double s = std::exp(-2.0 * mean);
    for (double& l : dm.lambda) l *= s;
    rep.termination = term;
    rep.iterations = iterations;
    rep.u_final = ConformalFactor{u};
    rep.surface = dm.surface;
    rep.metric = PLMetric{dm.lambda};
    rep.cocircular_edges = cocircular_edges_of(dm);
    rep.wall_time_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start)
            .count();
  }

  [[noreturn]] void fail(ErrorCode code, const std::string& msg,
                         Termination term) {
    finalize(term);
    throw SolveError(code, msg, std::move(rep));
  }

  const CurvatureTarget& target;
  const SolverConfig& cfg;
  std::chrono::steady_clock::time_point start;
  SolveReport rep;
  DecoratedMetric dm;
  std::vector<double> u;
  Residual res;
  int iterations = 0;
};

// Solves H x = rhs on the hyperplane sum(x) = 0 by pinning vertex 0 and
// re-centering. Returns false when the factorization fails even with a tiny
// diagonal shift (callers fall back to the gradient direction).
bool solve_pinned(const CurvatureJacobian& h, const std::vector<double>& rhs,
                  std::vector<double>& x) {
  const int n = h.rows();
  if (n == 1) {
    x.assign(1, 0.0);
    return true;
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(h.nonZeros());
  double max_diag = 0.0;
  for (int k = 0; k < h.outerSize(); k++) {
    for (CurvatureJacobian::InnerIterator it(h, k); it; ++it) {
      if (it.row() > 0 && it.col() > 0)
        trips.emplace_back(it.row() - 1, it.col() - 1, it.value());
      if (it.row() == it.col()) max_diag = std::max(max_diag, it.value());
    }
  }
  Eigen::SparseMatrix<double> reduced(n - 1, n - 1);
  reduced.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd b(n - 1);
  for (int i = 1; i < n; i++) b[i - 1] = rhs[i];

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.compute(reduced);
  Eigen::VectorXd sol;
  if (ldlt.info() == Eigen::Success) sol = ldlt.solve(b);
  if (ldlt.info() != Eigen::Success || !sol.allFinite()) {
    // Cocircular walls can zero out edge weights and disconnect the
    // weighted graph; a tiny shift restores definiteness without visibly
    // biasing the direction.
    Eigen::SparseMatrix<double> shifted = reduced;
    double eps = std::max(1e-12, 1e-12 * max_diag);
    for (int i = 0; i < n - 1; i++) shifted.coeffRef(i, i) += eps;
    ldlt.compute(shifted);
    if (ldlt.info() != Eigen::Success) return false;
    sol = ldlt.solve(b);
    if (!sol.allFinite()) return false;
  }
  x.assign(n, 0.0);
  for (int i = 1; i < n; i++) x[i] = sol[i - 1];
  recenter(x);
  return true;
}

}  // namespace

CurvatureMapResult curvature_map(const MarkedSurface& m, const PLMetric& d,
                                 const ConformalFactor& u) {
  DecoratedMetric dm = pl_to_decorated(m, d);
  FlipLog flips = scale_and_repair(dm, u.u, 1.0);
  CurvatureField k = curvature_of(dm);
  return CurvatureMapResult{std::move(k), std::move(dm.surface),
                            PLMetric{std::move(dm.lambda)}, std::move(flips)};
}

CurvatureJacobian curvature_jacobian(const MarkedSurface& m,
                                     const PLMetric& d) {
  for (EdgeId e = 0; e < m.edge_count(); e++)
    if (is_delaunay_edge(m, d, e) == DelaunayClass::Violated)
      throw Error(ErrorCode::NotDelaunay,
                  "edge " + std::to_string(e) +
                      " violates the Delaunay condition; the Hessian formula "
                      "assumes a Delaunay chart");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(12 * m.face_count());
  for (FaceId f = 0; f < m.face_count(); f++) {
    std::array<double, 3> ang = face_angles(m, d, f);
    const FaceSpec& fs = m.face(f);
    double cot[3];
    for (int i = 0; i < 3; i++) cot[i] = std::cos(ang[i]) / std::sin(ang[i]);
    // d(theta_a)/du at the vertex of corner b is cot(theta_c) for b != a and
    // -(cot(theta_b) + cot(theta_c)) for b == a; K = 2*pi - sum(theta)
    // negates that. Accumulating by vertex label makes loops and multi-edges
    // come out right without special cases.
    for (int a = 0; a < 3; a++) {
      int bidx = (a + 1) % 3, cidx = (a + 2) % 3;
      trips.emplace_back(fs.v[a], fs.v[a], cot[bidx] + cot[cidx]);
      trips.emplace_back(fs.v[a], fs.v[bidx], -cot[cidx]);
      trips.emplace_back(fs.v[a], fs.v[cidx], -cot[bidx]);
    }
  }
  CurvatureJacobian h(m.vertex_count(), m.vertex_count());
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

double jacobian_symmetry_check(const MarkedSurface& m, const PLMetric& d,
                               const ConformalFactor& u, double fd_step) {
  const int n = m.vertex_count();
  Eigen::MatrixXd jac(n, n);
  ConformalFactor probe = u;
  for (int j = 0; j < n; j++) {
    probe.u[j] = u[j] + fd_step;
    CurvatureField kp = curvature_map(m, d, probe).k;
    probe.u[j] = u[j] - fd_step;
    CurvatureField km = curvature_map(m, d, probe).k;
    probe.u[j] = u[j];
    for (int i = 0; i < n; i++)
      jac(i, j) = (kp[i] - km[i]) / (2.0 * fd_step);
  }
  return (jac - jac.transpose()).cwiseAbs().maxCoeff();
}

SolveReport newton_uniformize(const MarkedSurface& m, const PLMetric& d,
                              const CurvatureTarget& target,
                              const SolverConfig& cfg) {
  SolverRun run(m, d, target, cfg);

  while (run.res.max > cfg.residual_tol) {
    if (run.iterations >= cfg.max_newton_iters)
      run.fail(ErrorCode::MaxItersExceeded,
               "Newton did not reach the residual tolerance in " +
                   std::to_string(cfg.max_newton_iters) + " iterations",
               Termination::MaxItersExceeded);

    PLMetric cur{run.dm.lambda};
    CurvatureJacobian h = curvature_jacobian(run.dm.surface, cur);
    std::vector<double> rhs(run.res.r);
    for (double& x : rhs) x = -x;

    // Directional derivative of f = 1/2 ||K - K*||^2 along delta is
    // (H r) . delta; fall back to steepest descent if the Newton system
    // fails or the computed direction is not downhill.
    Eigen::Map<const Eigen::VectorXd> rv(run.res.r.data(), run.res.r.size());
    Eigen::VectorXd grad = h * rv;
    auto slope_along = [&](const std::vector<double>& dir) {
      return grad.dot(Eigen::Map<const Eigen::VectorXd>(dir.data(),
                                                        dir.size()));
    };
    std::vector<double> delta;
    bool have_newton = solve_pinned(h, rhs, delta);
    double slope = have_newton ? slope_along(delta) : 0.0;
    if (!have_newton || slope >= 0.0) {
      delta = rhs;  // -(K - K*)
      recenter(delta);
      slope = std::min(slope_along(delta), -run.res.l2 * run.res.l2);
    }

    // Keep exponents finite: |t * (du+du')| stays below ~60.
    double dmax = 0.0;
    for (double x : delta) dmax = std::max(dmax, std::abs(x));
    double t = std::min(1.0, 30.0 / std::max(dmax, 1e-300));

    double f0 = 0.5 * run.res.l2 * run.res.l2;
    bool accepted = false;
    while (t >= cfg.min_step) {
      DecoratedMetric trial = run.dm;
      FlipLog flips = scale_and_repair(trial, delta, t);
      Residual trial_res = residual_of(curvature_of(trial), target);
      double ft = 0.5 * trial_res.l2 * trial_res.l2;
      if (ft <= f0 + cfg.armijo_c * t * slope) {
        run.accept(std::move(trial), flips, delta, t, std::move(trial_res));
        accepted = true;
        break;
      }
      t *= cfg.armijo_shrink;
    }
    if (!accepted)
      run.fail(ErrorCode::LineSearchStalled,
               "backtracking line search hit the minimum step without "
               "sufficient decrease",
               Termination::LineSearchStalled);
  }

  run.finalize(Termination::Converged);
  return std::move(run.rep);
}

SolveReport yamabe_flow(const MarkedSurface& m, const PLMetric& d,
                        const CurvatureTarget& target,
                        const SolverConfig& cfg) {
  SolverRun run(m, d, target, cfg);

  while (run.res.max > cfg.residual_tol) {
    if (run.iterations >= cfg.max_flow_iters)
      run.fail(ErrorCode::MaxItersExceeded,
               "flow did not reach the residual tolerance in " +
                   std::to_string(cfg.max_flow_iters) + " steps",
               Termination::MaxItersExceeded);

    // u' = K* - K: the energy-decreasing direction in these coordinates
    // (the convex energy has gradient K - K*). The acceptance rule below
    // re-verifies the descent numerically at every step.
    std::vector<double> dir(run.res.r);
    for (double& x : dir) x = -x;

    double h = cfg.flow_step;
    bool accepted = false;
    while (h >= cfg.min_step) {
      DecoratedMetric trial = run.dm;
      FlipLog flips = scale_and_repair(trial, dir, h);
      Residual trial_res = residual_of(curvature_of(trial), target);
      if (trial_res.l2 < run.res.l2) {
        run.accept(std::move(trial), flips, dir, h, std::move(trial_res));
        accepted = true;
        break;
      }
      h *= 0.5;
    }
    if (!accepted)
      run.fail(ErrorCode::StepTooLarge,
               run.iterations == 0
                   ? "first flow step found no residual decrease in the "
                     "u' = K* - K direction even after halving to the "
                     "minimum step; direction self-check failed"
                   : "flow step fell below the minimum without residual "
                     "decrease; try a smaller flow_step",
               Termination::StepTooLarge);
  }

  run.finalize(Termination::Converged);
  return std::move(run.rep);
}

EquivalenceResult conformal_equivalent(const MarkedSurface& m,
                                       const PLMetric& d_a, const PLMetric& d_b,
                                       double tol, const SolverConfig& cfg) {
  CurvatureTarget target = CurvatureTarget::uniform(m);
  SolveReport ra = newton_uniformize(m, d_a, target, cfg);
  SolveReport rb = newton_uniformize(m, d_b, target, cfg);

  auto full_sequence = [](const SolveReport& r) {
    std::vector<EdgeId> seq;
    seq.reserve(r.initial_repair.entries.size() + r.flip_sequence.size());
    for (const FlipRecord& rec : r.initial_repair.entries)
      seq.push_back(rec.e);
    seq.insert(seq.end(), r.flip_sequence.begin(), r.flip_sequence.end());
    return seq;
  };
  std::vector<EdgeId> seq_a = full_sequence(ra), seq_b = full_sequence(rb);

  // Carry B's limit into A's final chart: undo B's chart changes back to
  // the shared input triangulation, then replay A's. Ptolemy transitions
  // keep the decorated structure itself fixed, and flips invert themselves
  // (up to a rotation of the face records, which nothing downstream reads),
  // so the replays are always legal and land on A's chart edge-for-edge.
  DecoratedMetric carried{rb.surface, rb.metric.lengths};
  for (auto it = seq_b.rbegin(); it != seq_b.rend(); ++it)
    ptolemy_flip(carried, *it);
  for (EdgeId e : seq_a) ptolemy_flip(carried, e);

  auto normalize = [](std::vector<double> v) {
    double log_sum = 0.0;
    for (double x : v) log_sum += std::log(x);
    double scale = std::exp(-log_sum / static_cast<double>(v.size()));
    for (double& x : v) x *= scale;
    return v;
  };
  EquivalenceResult out;
  out.normalized_a = normalize(ra.metric.lengths);
  out.normalized_b = normalize(carried.lambda);
  for (size_t e = 0; e < out.normalized_a.size(); e++) {
    double a = out.normalized_a[e], b = out.normalized_b[e];
    out.max_rel_diff =
        std::max(out.max_rel_diff, std::abs(a - b) / std::max(a, b));
  }
  out.equivalent = out.max_rel_diff <= tol;
  return out;
}

std::vector<EdgeId> delaunay_cell_inequalities(
    const MarkedSurface& m, const std::vector<double>& b,
    const std::vector<double>& delta) {
  std::vector<EdgeId> violated;
  for (EdgeId e = 0; e < m.edge_count(); e++) {
    QuadLayout l = m.quad_layout(e);
    double b0 = b[e];
    double b1 = b[m.edge_of(l.s1)], b2 = b[m.edge_of(l.s2)];
    double b3 = b[m.edge_of(l.s3)], b4 = b[m.edge_of(l.s4)];
    double dp = delta[l.p], dq = delta[l.q], dc = delta[l.c], dd = delta[l.d];
    // Hyperbolic Delaunay margin times sqrt(delta(p) delta(q)) at
    // x = b/sqrt(delta delta'): linear in delta with positive coefficients
    // on each side of the inequality.
    double margin = (b1 / b2 + b4 / b3) * dp + (b2 / b1 + b3 / b4) * dq -
                    (b0 * b0) / (b1 * b2) * dc - (b0 * b0) / (b3 * b4) * dd;
    if (margin < -kCocircularTol * std::sqrt(dp * dq)) violated.push_back(e);
  }
  return violated;
}

}  // namespace dcu
