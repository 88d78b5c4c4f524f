#include <benchmark/benchmark.h>

#include "scratchkit/defense.hpp"
#include "scratchkit/png_io.hpp"
#include "scratchkit/rng.hpp"
#include "scratchkit/scratch.hpp"
#include "scratchkit/toy_model.hpp"

using namespace scratchkit;

namespace {

const std::string kFixtures = SCRATCHKIT_FIXTURES_DIR;

std::vector<ScratchParams> sample_scratches(int count, int height, int width) {
  Rng rng(99);
  std::vector<ScratchParams> scratches;
  for (int s = 0; s < count; ++s) {
    ScratchParams p;
    p.order = 2;
    for (int i = 0; i < 3; ++i) {
      p.coords.push_back(rng.uniform(0.0, width - 1.0));
      p.coords.push_back(rng.uniform(0.0, height - 1.0));
    }
    p.color_params = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
    scratches.push_back(std::move(p));
  }
  return scratches;
}

// One attack-loop step without the optimizer: clip, paint, classify.
void BM_ApplyAndClassify(benchmark::State& state) {
  ToyModel model = ToyModel::load_file(kFixtures + "/toy_model.json");
  const Image image = read_png(kFixtures + "/images/img_00.png");
  const TargetRegion region = TargetRegion::all_ones(image.height, image.width);
  const auto scratches =
      sample_scratches(static_cast<int>(state.range(0)), image.height, image.width);
  for (auto _ : state) {
    const ScratchApplication out = apply_scratches(
        image, scratches, 16, region, ColorMode::PolychromeSaturated);
    benchmark::DoNotOptimize(model.forward(out.image));
  }
}
BENCHMARK(BM_ApplyAndClassify)->Arg(1)->Arg(3)->Arg(5);

void BM_ClipScratch(benchmark::State& state) {
  const auto scratches = sample_scratches(1, 224, 224);
  const TargetRegion region = TargetRegion::all_ones(224, 224);
  for (auto _ : state) {
    benchmark::DoNotOptimize(clip_scratch(scratches[0], 133, region));
  }
}
BENCHMARK(BM_ClipScratch);

void BM_MedianFilter(benchmark::State& state) {
  const Image gradient = read_png(kFixtures + "/gradient.png");
  for (auto _ : state) {
    benchmark::DoNotOptimize(defend(gradient, DefenseSpec::median()));
  }
}
BENCHMARK(BM_MedianFilter);

void BM_JpegRoundTrip(benchmark::State& state) {
  const Image gradient = read_png(kFixtures + "/gradient.png");
  const DefenseSpec spec = DefenseSpec::jpeg(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(defend(gradient, spec));
  }
}
BENCHMARK(BM_JpegRoundTrip)->Arg(85)->Arg(99);

}  // namespace

BENCHMARK_MAIN();
