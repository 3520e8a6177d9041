#include "dcu/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace dcu {

namespace {

// Lengths of the four quad boundary sides in cyclic order (q->c, c->p,
// p->d, d->q), plus x0 = |e|.
std::array<double, 5> quad_lengths(const MarkedSurface& m, const PLMetric& d,
                                   const QuadLayout& l) {
  return {d[l.e], d[m.edge_of(l.s1)], d[m.edge_of(l.s2)], d[m.edge_of(l.s3)],
          d[m.edge_of(l.s4)]};
}

void check_face_slack(double a, double b, double c, EdgeId e) {
  double slack = std::min({a + b - c, b + c - a, c + a - b}) / (a + b + c);
  if (slack <= kDegenerateSlackTol)
    throw Error(ErrorCode::DegenerateTriangle,
                e >= 0 ? "a triangle at edge " + std::to_string(e) +
                             " is degenerate"
                       : "triangle side lengths are degenerate");
}

// Apex of the triangle with base (0,0)--(a,0), base-adjacent side lengths
// r0 from the left and r1 from the right, placed at y >= 0.
Eigen::Vector2d apex_above(double a, double r0, double r1) {
  double x = (r0 * r0 - r1 * r1 + a * a) / (2.0 * a);
  double y2 = r0 * r0 - x * x;
  return {x, std::sqrt(std::max(y2, 0.0))};
}

}  // namespace

EdgeQuad edge_quad(const MarkedSurface& m, const PLMetric& d, EdgeId e) {
  QuadLayout l = m.quad_layout(e);
  auto x = quad_lengths(m, d, l);
  check_face_slack(x[1], x[2], x[0], e);
  check_face_slack(x[3], x[4], x[0], e);
  EdgeQuad q;
  q.e = e;
  q.x0 = x[0];
  q.x1 = x[1];
  q.x2 = x[2];
  q.x3 = x[3];
  q.x4 = x[4];
  q.alpha = corner_angle(x[1], x[2], x[0]);
  q.alpha_prime = corner_angle(x[3], x[4], x[0]);
  q.self_glued = l.self_glued;
  return q;
}

double delaunay_margin(double x0, double x1, double x2, double x3, double x4) {
  return (x1 * x1 + x2 * x2 - x0 * x0) / (2.0 * x1 * x2) +
         (x3 * x3 + x4 * x4 - x0 * x0) / (2.0 * x3 * x4);
}

double delaunay_margin(const MarkedSurface& m, const PLMetric& d, EdgeId e) {
  QuadLayout l = m.quad_layout(e);
  auto x = quad_lengths(m, d, l);
  check_face_slack(x[1], x[2], x[0], e);
  check_face_slack(x[3], x[4], x[0], e);
  return delaunay_margin(x[0], x[1], x[2], x[3], x[4]);
}

DelaunayClass classify_margin(double margin, double tol) {
  if (margin > tol) return DelaunayClass::StrictlyDelaunay;
  if (margin < -tol) return DelaunayClass::Violated;
  return DelaunayClass::Cocircular;
}

DelaunayClass is_delaunay_edge(const MarkedSurface& m, const PLMetric& d,
                               EdgeId e) {
  return classify_margin(delaunay_margin(m, d, e));
}

std::array<Eigen::Vector2d, 4> embed_quad(const MarkedSurface& m,
                                          const PLMetric& d, EdgeId e) {
  QuadLayout l = m.quad_layout(e);
  auto x = quad_lengths(m, d, l);
  check_face_slack(x[1], x[2], x[0], e);
  check_face_slack(x[3], x[4], x[0], e);
  Eigen::Vector2d p(0.0, 0.0), q(x[0], 0.0);
  Eigen::Vector2d c = apex_above(x[0], x[2], x[1]);  // |pc| = x2, |qc| = x1
  Eigen::Vector2d dn = apex_above(x[0], x[3], x[4]);  // |pd| = x3, |qd| = x4
  dn.y() = -dn.y();
  return {p, q, c, dn};
}

double diagonal_length(double x, double y, double z, double w, double a) {
  check_face_slack(x, y, a, -1);
  check_face_slack(z, w, a, -1);
  Eigen::Vector2d c = apex_above(a, y, x);  // |pc| = y, |qc| = x
  Eigen::Vector2d dn = apex_above(a, z, w);
  dn.y() = -dn.y();
  // The switch is valid only when the two diagonals cross: the segment c--d
  // must meet the open base (0,a) on the axis.
  double t = c.y() / (c.y() - dn.y());
  double cross_x = c.x() + t * (dn.x() - c.x());
  if (!(cross_x > 0.0 && cross_x < a))
    throw Error(ErrorCode::NonConvexQuad,
                "quad does not unfold convexly; the diagonal switch is "
                "geometrically invalid");
  return (c - dn).norm();
}

double ptolemy_length(double x, double y, double z, double w, double a) {
  return (x * z + y * w) / a;
}

double flip_edge(MarkedSurface& m, PLMetric& d, EdgeId e) {
  QuadLayout l = m.quad_layout(e);
  if (l.self_glued)
    throw Error(ErrorCode::UnflippableEdge,
                "edge " + std::to_string(e) +
                    " has both sides on one face and admits no flip");
  auto x = quad_lengths(m, d, l);
  double a = diagonal_length(x[1], x[2], x[3], x[4], x[0]);
  // The new faces are (c,p,d) and (d,q,c); refuse a switch that would leave
  // a degenerate triangle even though the diagonals crossed.
  check_face_slack(x[2], x[3], a, e);
  check_face_slack(x[4], x[1], a, e);
  m.flip(e);
  d[e] = a;
  return a;
}

FlipLog make_delaunay(MarkedSurface& m, PLMetric& d) {
  double lo = *std::min_element(d.lengths.begin(), d.lengths.end());
  double hi = *std::max_element(d.lengths.begin(), d.lengths.end());
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
    if (is_delaunay_edge(m, d, e) == DelaunayClass::Violated) enqueue(e);

  FlipLog log;
  while (!queue.empty()) {
    EdgeId e = queue.front();
    queue.pop_front();
    queued[e] = 0;
    if (is_delaunay_edge(m, d, e) != DelaunayClass::Violated) continue;
    if (log.count() >= budget)
      throw Error(ErrorCode::FlipBudgetExceeded,
                  "exceeded " + std::to_string(budget) +
                      " flips while restoring the Delaunay condition");
    QuadLayout l = m.quad_layout(e);
    // A self-glued edge is always strictly Delaunay (its margin reduces to
    // a positive length ratio), so the queue never sees one here.
    EdgeId ring[4] = {m.edge_of(l.s1), m.edge_of(l.s2), m.edge_of(l.s3),
                      m.edge_of(l.s4)};
    double old_len = d[e];
    double new_len = flip_edge(m, d, e);
    log.entries.push_back({e, old_len, new_len, log.count()});
    for (EdgeId r : ring)
      if (r != e) enqueue(r);
  }
  return log;
}

double diagonal_derivative_check(double x, double y, double z, double w,
                                 double a) {
  double b = ptolemy_length(x, y, z, w, a);
  if (std::abs(diagonal_length(x, y, z, w, a) - b) > 1e-9)
    throw Error(ErrorCode::NonConvexQuad,
                "configuration is not cocircular; the derivative identity "
                "only holds on the cocircular locus");
  const double db[5] = {z / a, w / a, x / a, y / a, -b / a};
  double v[5] = {x, y, z, w, a};
  double worst = 0.0;
  for (int i = 0; i < 5; i++) {
    double h = 1e-6 * std::max(1.0, std::abs(v[i]));
    double keep = v[i];
    v[i] = keep + h;
    double ap = diagonal_length(v[0], v[1], v[2], v[3], v[4]);
    v[i] = keep - h;
    double am = diagonal_length(v[0], v[1], v[2], v[3], v[4]);
    v[i] = keep;
    double fd = (ap - am) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - db[i]));
  }
  return worst;
}

}  // namespace dcu
