#include <benchmark/benchmark.h>

#include <random>

#include "mixoram/deployment.hpp"

using namespace mixoram;

namespace {

// One full eviction (s reads, then the mixes' work) per iteration.
void BM_Eviction(benchmark::State& state, Design design) {
  DeploymentConfig cfg;
  cfg.design = design;
  cfg.n = static_cast<std::uint64_t>(state.range(0));
  cfg.m = static_cast<std::uint32_t>(state.range(1));
  cfg.payload_bytes = 32;
  cfg.cache_slots = 1;
  while (cfg.cache_slots * cfg.cache_slots < cfg.n) ++cfg.cache_slots;
  cfg.seed = 1;
  Deployment dep(cfg);
  dep.preprocess(std::vector<Bytes>(cfg.n, Bytes(32, 0x33)));
  std::mt19937_64 rng(2);
  for (auto _ : state) {
    state.PauseTiming();
    for (std::size_t i = 0; i < cfg.cache_slots; ++i) dep.read(rng() % cfg.n);
    state.ResumeTiming();
    dep.evict();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK_CAPTURE(BM_Eviction, cascade_layered, Design::kCascadeLayered)
    ->Args({256, 4})->Args({4096, 4})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Eviction, cascade_rebuild, Design::kCascadeRebuild)
    ->Args({256, 4})->Args({4096, 4})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Eviction, parallel_layered, Design::kParallelLayered)
    ->Args({256, 4})->Args({4096, 4})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Eviction, parallel_rebuild, Design::kParallelRebuild)
    ->Args({256, 4})->Args({4096, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
