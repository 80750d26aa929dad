#include <benchmark/benchmark.h>

#include <random>

#include "pdil/hardy.hpp"
#include "pdil/variety.hpp"

using namespace pdil;

static void BM_BuildTriple(benchmark::State& state) {
  const CommutingPair p = random_commuting_pure_pair(1, state.range(0), 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(build_complete_bcl_triple(p));
}
BENCHMARK(BM_BuildTriple)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_Dilation(benchmark::State& state) {
  const CommutingPair p = random_commuting_pure_pair(2, state.range(0), 0.9);
  const BCLTriple t = build_complete_bcl_triple(p);
  for (auto _ : state) benchmark::DoNotOptimize(dilation_map_pair(p, t, 40));
}
BENCHMARK(BM_Dilation)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_SampleVariety(benchmark::State& state) {
  const CommutingPair p = random_commuting_pure_pair(3, state.range(0), 0.9);
  const BCLTriple t = build_complete_bcl_triple(p);
  const VarietyGrid grid = VarietyGrid::geometric(16, 64);
  for (auto _ : state) benchmark::DoNotOptimize(sample_variety(t, grid));
}
BENCHMARK(BM_SampleVariety)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_VonNeumannCheck(benchmark::State& state) {
  const CommutingPair p = random_commuting_pure_pair(4, 6, 0.9);
  const BCLTriple t = build_complete_bcl_triple(p);
  const VarietySample s = sample_variety(t, VarietyGrid::geometric(64, 256));
  std::mt19937_64 rng(5);
  const BivariatePoly poly = random_poly(rng, 4);
  for (auto _ : state) benchmark::DoNotOptimize(von_neumann_check(p, s, poly));
}
BENCHMARK(BM_VonNeumannCheck)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
