#include <benchmark/benchmark.h>

#include "uf/coverage.hpp"
#include "uf/harness.hpp"
#include "uf/rng.hpp"

namespace {

// A representative honeypot run: a couple dozen events over a 64 KiB map.
struct Fixture {
  const uf::TargetProgram& target = uf::find_target("honeypot");
  uf::GuardTable table = uf::allocate_guards(target.functions);
  uf::ExecutionTrace trace;

  Fixture() {
    std::vector<uint8_t> input;
    uf::Rng rng(11);
    for (int i = 0; i < 20; ++i) input.push_back(rng.byte());
    if (input[0] == 'K') input[0] = 'x';
    target.execute_into(input.data(), input.size(), trace);
  }
};

void BM_apply_trace(benchmark::State& state) {
  Fixture f;
  uf::CoverageMap map(f.table.map_size);
  std::vector<uint32_t> touched;
  for (auto _ : state) {
    touched.clear();
    uf::apply_trace(map, f.table, f.trace, &touched);
    map.reset_slots(touched);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(f.trace.events.size()));
}
BENCHMARK(BM_apply_trace);

void BM_novelty_full_scan(benchmark::State& state) {
  Fixture f;
  uf::CoverageMap map(f.table.map_size);
  std::vector<uint32_t> touched;
  uf::apply_trace(map, f.table, f.trace, &touched);
  uf::BucketSummary summary(f.table.map_size);
  for (auto _ : state) {
    uf::NoveltyResult r = uf::novelty_check(summary, map);
    benchmark::DoNotOptimize(r.is_novel);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) * f.table.map_size);
}
BENCHMARK(BM_novelty_full_scan);

void BM_novelty_touched_list(benchmark::State& state) {
  Fixture f;
  uf::CoverageMap map(f.table.map_size);
  std::vector<uint32_t> touched;
  uf::apply_trace(map, f.table, f.trace, &touched);
  uf::BucketSummary summary(f.table.map_size);
  for (auto _ : state) {
    uf::NoveltyResult r = uf::novelty_check(summary, map, touched);
    benchmark::DoNotOptimize(r.is_novel);
  }
}
BENCHMARK(BM_novelty_touched_list);

void BM_map_reset_full(benchmark::State& state) {
  uf::CoverageMap map(uf::kDefaultMapSize);
  for (auto _ : state) {
    map.reset();
    benchmark::DoNotOptimize(map.data());
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) * uf::kDefaultMapSize);
}
BENCHMARK(BM_map_reset_full);

}  // namespace

BENCHMARK_MAIN();
