#include <benchmark/benchmark.h>

#include "scratchkit/geometry.hpp"
#include "scratchkit/rng.hpp"

using namespace scratchkit;

namespace {

BezierCurve sample_curve(int order) {
  Rng rng(order * 7919 + 3);
  std::vector<ControlPoint> pts;
  for (int i = 0; i <= order; ++i) {
    pts.push_back({rng.uniform(2.0, 220.0), rng.uniform(2.0, 220.0)});
  }
  return BezierCurve(std::move(pts));
}

void BM_Evaluate(benchmark::State& state) {
  const BezierCurve curve = sample_curve(static_cast<int>(state.range(0)));
  double t = 0.0;
  for (auto _ : state) {
    t += 0.001;
    if (t > 1.0) t = 0.0;
    benchmark::DoNotOptimize(curve.evaluate(t));
  }
}
BENCHMARK(BM_Evaluate)->Arg(1)->Arg(2)->Arg(4);

void BM_Subdivide(benchmark::State& state) {
  const BezierCurve curve = sample_curve(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(curve.subdivide(0.21, 0.83));
  }
}
BENCHMARK(BM_Subdivide)->Arg(2)->Arg(4);

void BM_RasterizeFast(benchmark::State& state) {
  const BezierCurve curve = sample_curve(2);
  const RasterBounds bounds{224, 224};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rasterize(curve, bounds, RasterQuality::Fast));
  }
}
BENCHMARK(BM_RasterizeFast);

void BM_RasterizeExhaustive(benchmark::State& state) {
  const BezierCurve curve = sample_curve(2);
  const RasterBounds bounds{224, 224};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rasterize(curve, bounds));
  }
}
BENCHMARK(BM_RasterizeExhaustive);

}  // namespace

BENCHMARK_MAIN();
