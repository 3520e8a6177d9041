#include "dcu/penner.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace dcu {

namespace {

std::array<double, 5> quad_lambdas(const DecoratedMetric& dm,
                                   const QuadLayout& l) {
  const MarkedSurface& m = dm.surface;
  return {dm.lambda[l.e], dm.lambda[m.edge_of(l.s1)],
          dm.lambda[m.edge_of(l.s2)], dm.lambda[m.edge_of(l.s3)],
          dm.lambda[m.edge_of(l.s4)]};
}

}  // namespace

double penner_angle(double li, double lj, double lk) {
  return li / (lj * lk);
}

std::vector<double> horocycle_lengths(const DecoratedMetric& dm) {
  const MarkedSurface& m = dm.surface;
  std::vector<double> w(m.vertex_count(), 0.0);
  for (FaceId f = 0; f < m.face_count(); f++) {
    const FaceSpec& fs = m.face(f);
    double l0 = dm.lambda[fs.e[0]], l1 = dm.lambda[fs.e[1]],
           l2 = dm.lambda[fs.e[2]];
    // Corner k faces side k+1 and touches sides k and k-1.
    w[fs.v[0]] += penner_angle(l1, l0, l2);
    w[fs.v[1]] += penner_angle(l2, l1, l0);
    w[fs.v[2]] += penner_angle(l0, l2, l1);
  }
  return w;
}

DecoratedMetric pl_to_decorated(const MarkedSurface& m, const PLMetric& d) {
  require_valid_metric(m, d);
  for (EdgeId e = 0; e < m.edge_count(); e++)
    if (is_delaunay_edge(m, d, e) == DelaunayClass::Violated)
      throw Error(ErrorCode::NotDelaunay,
                  "edge " + std::to_string(e) +
                      " violates the Delaunay condition; the chart identity "
                      "only applies to Delaunay metrics");
  return DecoratedMetric{m, d.lengths};
}

double hyperbolic_delaunay_margin(double x0, double x1, double x2, double x3,
                                  double x4) {
  return x1 / x2 + x2 / x1 + x3 / x4 + x4 / x3 - (x0 * x0) / (x1 * x2) -
         (x0 * x0) / (x3 * x4);
}

double hyperbolic_delaunay_margin(const DecoratedMetric& dm, EdgeId e) {
  auto x = quad_lambdas(dm, dm.surface.quad_layout(e));
  return hyperbolic_delaunay_margin(x[0], x[1], x[2], x[3], x[4]);
}

DelaunayClass hyperbolic_delaunay_edge(const DecoratedMetric& dm, EdgeId e) {
  // The hyperbolic margin is exactly twice the Euclidean one, so halving it
  // makes the two predicates share one cocircular band.
  return classify_margin(0.5 * hyperbolic_delaunay_margin(dm, e));
}

void ptolemy_flip(DecoratedMetric& dm, EdgeId e) {
  QuadLayout l = dm.surface.quad_layout(e);
  if (l.self_glued)
    throw Error(ErrorCode::UnflippableEdge,
                "edge " + std::to_string(e) +
                    " has both sides on one face and admits no flip");
  auto x = quad_lambdas(dm, l);
  dm.surface.flip(e);
  dm.lambda[e] = ptolemy_length(x[1], x[2], x[3], x[4], x[0]);
}

FlipLog hyperbolic_make_delaunay(DecoratedMetric& dm) {
  const MarkedSurface& m = dm.surface;
  double lo = *std::min_element(dm.lambda.begin(), dm.lambda.end());
  double hi = *std::max_element(dm.lambda.begin(), dm.lambda.end());
  long budget = static_cast<long>(
      std::ceil(50.0 * m.edge_count() * (1.0 + std::abs(std::log(hi / lo)))));

  std::deque<EdgeId> queue;
  std::vector<char> queued(m.edge_count(), 0);
  auto enqueue = [&](EdgeId e) {
    if (!queued[e]) {
      queued[e] = 1;
      queue.push_back(e);
    }
  };
  for (EdgeId e = 0; e < m.edge_count(); e++)
    if (hyperbolic_delaunay_edge(dm, e) == DelaunayClass::Violated) enqueue(e);

  FlipLog log;
  while (!queue.empty()) {
    EdgeId e = queue.front();
    queue.pop_front();
    queued[e] = 0;
    if (hyperbolic_delaunay_edge(dm, e) != DelaunayClass::Violated) continue;
    if (log.count() >= budget)
      throw Error(ErrorCode::FlipBudgetExceeded,
                  "exceeded " + std::to_string(budget) +
                      " Ptolemy flips while restoring the Delaunay condition");
    QuadLayout l = dm.surface.quad_layout(e);
    EdgeId ring[4] = {m.edge_of(l.s1), m.edge_of(l.s2), m.edge_of(l.s3),
                      m.edge_of(l.s4)};
    double old_len = dm.lambda[e];
    ptolemy_flip(dm, e);
    log.entries.push_back({e, old_len, dm.lambda[e], log.count()});
    for (EdgeId r : ring) enqueue(r);
  }
  return log;
}

DecoratedMetric conformal_scale_lambda(const DecoratedMetric& dm,
                                       const ConformalFactor& u) {
  DecoratedMetric out = dm;
  for (EdgeId e = 0; e < dm.surface.edge_count(); e++) {
    auto ab = dm.surface.endpoints(e);
    out.lambda[e] = dm.lambda[e] * std::exp(u[ab[0]] + u[ab[1]]);
  }
  return out;
}

double edge_shear(const DecoratedMetric& dm, EdgeId e) {
  auto x = quad_lambdas(dm, dm.surface.quad_layout(e));
  return (x[1] * x[3]) / (x[2] * x[4]);
}

std::vector<double> shear_vector(const DecoratedMetric& dm) {
  std::vector<double> s(dm.surface.edge_count());
  for (EdgeId e = 0; e < dm.surface.edge_count(); e++) s[e] = edge_shear(dm, e);
  return s;
}

}  // namespace dcu
