#include <benchmark/benchmark.h>

#include "mixoram/group.hpp"
#include "mixoram/permutation.hpp"
#include "mixoram/prg.hpp"
#include "mixoram/sym.hpp"

using namespace mixoram;

namespace {

Bytes key16() {
  Bytes k(16);
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<std::uint8_t>(i);
  return k;
}

void BM_PermutationFromSeed(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto seed = key16();
  for (auto _ : state) benchmark::DoNotOptimize(permutation_from_seed(seed, n));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PermutationFromSeed)->RangeMultiplier(16)->Range(16, 1 << 16);

void BM_CtrLayer(benchmark::State& state) {
  RecordCipher cipher;
  Bytes body(static_cast<std::size_t>(state.range(0)), 0x42);
  auto key = key16();
  std::uint64_t counter = 0;
  for (auto _ : state) {
    cipher.ctr(body, key, {1, LayerPhase::kWrap, counter++});
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CtrLayer)->Arg(32)->Arg(256)->Arg(4096);

void BM_CtrKeyReuse(benchmark::State& state) {
  Bytes body(static_cast<std::size_t>(state.range(0)), 0x42);
  CtrKey key(key16());
  std::uint64_t counter = 0;
  for (auto _ : state) {
    key.apply(body, {1, LayerPhase::kWrap, counter++});
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CtrKeyReuse)->Arg(32)->Arg(256)->Arg(4096);

void BM_LayeredWrap(benchmark::State& state) {
  RecordCipher cipher;
  auto fmt = LayeredFormat::for_database(1 << 20, static_cast<std::size_t>(state.range(0)));
  auto rec = make_layered_record(fmt, 12345, Bytes(fmt.payload_bytes, 7), Bytes(fmt.label_bytes, 1));
  auto key = key16();
  for (auto _ : state) {
    rec = cipher.wrap(rec, key);
    benchmark::DoNotOptimize(rec);
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LayeredWrap)->Arg(32)->Arg(256);

void BM_LayeredUnwrap(benchmark::State& state) {
  RecordCipher cipher;
  auto fmt = LayeredFormat::for_database(1 << 20, static_cast<std::size_t>(state.range(0)));
  auto rec = make_layered_record(fmt, 12345, Bytes(fmt.payload_bytes, 7), Bytes(fmt.label_bytes, 1));
  auto key = key16();
  for (auto _ : state) {
    rec = cipher.unwrap(rec, key);
    benchmark::DoNotOptimize(rec);
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LayeredUnwrap)->Arg(32)->Arg(256);

void BM_GroupExp(benchmark::State& state) {
  Ristretto255 g;
  Prg rng(key16());
  auto a = g.random_scalar(rng);
  auto base = g.exp_base(g.random_scalar(rng));
  for (auto _ : state) benchmark::DoNotOptimize(g.exp(base, a));
}
BENCHMARK(BM_GroupExp);

}  // namespace
