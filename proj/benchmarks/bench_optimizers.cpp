#include <benchmark/benchmark.h>

#include "scratchkit/optimizer.hpp"

using namespace scratchkit;

namespace {

SearchSpace nine_d_box() {
  SearchSpace space;
  space.lower.assign(9, -5.0);
  space.upper.assign(9, 5.0);
  return space;
}

double sphere(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return sum;
}

void BM_AskTell(benchmark::State& state) {
  const Strategy strategy = static_cast<Strategy>(state.range(0));
  const SearchSpace space = nine_d_box();
  auto opt = make_optimizer(strategy, space, 1);
  for (auto _ : state) {
    const auto v = opt->ask();
    opt->tell(v, sphere(v));
  }
  state.SetLabel(strategy_name(strategy));
}
BENCHMARK(BM_AskTell)
    ->Arg(static_cast<int>(Strategy::RandomSearch))
    ->Arg(static_cast<int>(Strategy::DifferentialEvolution))
    ->Arg(static_cast<int>(Strategy::ParticleSwarm))
    ->Arg(static_cast<int>(Strategy::NgoLike));

void BM_Minimize2000(benchmark::State& state) {
  const Strategy strategy = static_cast<Strategy>(state.range(0));
  const SearchSpace space = nine_d_box();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(minimize(strategy, space, sphere, 2000, ++seed));
  }
  state.SetLabel(strategy_name(strategy));
}
BENCHMARK(BM_Minimize2000)
    ->Arg(static_cast<int>(Strategy::RandomSearch))
    ->Arg(static_cast<int>(Strategy::NgoLike))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
