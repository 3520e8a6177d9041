#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "dcu/delaunay.hpp"
#include "dcu/metric.hpp"
#include "dcu/penner.hpp"
#include "dcu/uniformize.hpp"
#include "fixtures.hpp"

using namespace dcu;

namespace {

// A torus whose flat grid metric is skewed enough to need surgery.
struct SkewedTorus {
  fixtures::Mesh mesh;
  PLMetric metric;
  explicit SkewedTorus(int n) : mesh(fixtures::grid_torus(n, n)) {
    metric = mesh.metric;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> f(0.85, 1.2);
    for (double& l : metric.lengths) l *= f(rng);
    while (!validate_metric(mesh.surface, metric).empty()) {
      metric = mesh.metric;
      for (double& l : metric.lengths) l *= f(rng);
    }
  }
};

void bm_corner_angles(benchmark::State& state) {
  fixtures::Mesh g = fixtures::grid_torus(16, 16);
  for (auto _ : state) {
    CurvatureField k = curvature_field(g.surface, g.metric);
    benchmark::DoNotOptimize(k.k.data());
  }
  state.SetItemsProcessed(state.iterations() * g.surface.face_count() * 3);
}
BENCHMARK(bm_corner_angles);

void bm_delaunay_classification(benchmark::State& state) {
  SkewedTorus t(16);
  for (auto _ : state) {
    int violated = 0;
    for (EdgeId e = 0; e < t.mesh.surface.edge_count(); e++)
      violated += is_delaunay_edge(t.mesh.surface, t.metric, e) ==
                  DelaunayClass::Violated;
    benchmark::DoNotOptimize(violated);
  }
  state.SetItemsProcessed(state.iterations() * t.mesh.surface.edge_count());
}
BENCHMARK(bm_delaunay_classification);

void bm_make_delaunay(benchmark::State& state) {
  SkewedTorus t(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    MarkedSurface m = t.mesh.surface;
    PLMetric d = t.metric;
    FlipLog log = make_delaunay(m, d);
    benchmark::DoNotOptimize(log.count());
  }
}
BENCHMARK(bm_make_delaunay)->Arg(8)->Arg(16);

void bm_hessian_assembly(benchmark::State& state) {
  fixtures::Mesh g = fixtures::grid_torus(16, 16);
  for (auto _ : state) {
    CurvatureJacobian h = curvature_jacobian(g.surface, g.metric);
    benchmark::DoNotOptimize(h.nonZeros());
  }
}
BENCHMARK(bm_hessian_assembly);

void bm_ptolemy_surgery(benchmark::State& state) {
  SkewedTorus t(12);
  for (auto _ : state) {
    DecoratedMetric dm{t.mesh.surface, t.metric.lengths};
    FlipLog log = hyperbolic_make_delaunay(dm);
    benchmark::DoNotOptimize(log.count());
  }
}
BENCHMARK(bm_ptolemy_surgery);

void bm_newton_solve(benchmark::State& state) {
  SkewedTorus t(static_cast<int>(state.range(0)));
  CurvatureTarget target = CurvatureTarget::flat(t.mesh.surface);
  for (auto _ : state) {
    SolveReport rep = newton_uniformize(t.mesh.surface, t.metric, target);
    benchmark::DoNotOptimize(rep.iterations);
  }
}
BENCHMARK(bm_newton_solve)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
