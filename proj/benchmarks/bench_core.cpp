#include <benchmark/benchmark.h>

#include "hypbdry/plane.hpp"
#include "hypbdry/rep.hpp"
#include "hypbdry/tree.hpp"

using namespace hypbdry;

static void BM_StreamingCoefficient(benchmark::State& state) {
  FreeTreeModel m(2);
  const auto& g = m.group();
  auto u = SimpleFunction::indicator(g, CylinderSet::from_prefixes(g, {g.parse("ab"), g.parse("B")}));
  auto v = SimpleFunction::indicator(g, CylinderSet::from_prefixes(g, {g.parse("a")}));
  ReducedWord gamma;
  for (int i = 0; i < state.range(0); ++i) gamma = g.multiply(gamma, g.parse(i % 2 ? "b" : "a"));
  for (auto _ : state) benchmark::DoNotOptimize(matrix_coefficient(m, gamma, u, v));
}
BENCHMARK(BM_StreamingCoefficient)->Arg(4)->Arg(16)->Arg(64);

static void BM_TreeAnnulus(benchmark::State& state) {
  FreeTreeModel m(2);
  for (auto _ : state) benchmark::DoNotOptimize(m.enumerate_annulus(static_cast<double>(state.range(0))));
}
BENCHMARK(BM_TreeAnnulus)->Arg(6)->Arg(10);

static void BM_OrbitCacheBuild(benchmark::State& state) {
  PlaneGroup g = build_group(PlanePreset::Genus2Octagon);
  for (auto _ : state) {
    auto c = OrbitCache::build(g, OrbitCacheParams{PlanePreset::Genus2Octagon, static_cast<double>(state.range(0)), 0.0, 1});
    benchmark::DoNotOptimize(c.sorted().size());
  }
}
BENCHMARK(BM_OrbitCacheBuild)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
