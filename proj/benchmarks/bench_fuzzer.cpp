#include <benchmark/benchmark.h>

#include "uf/fuzzer.hpp"
#include "uf/pathfinder.hpp"

namespace {

uf::TrialConfig base_config(const std::string& target) {
  uf::TrialConfig cfg;
  cfg.target = target;
  cfg.rng_seed = 1234;
  cfg.duration_ms = 20000;  // 20k executions in virtual time
  return cfg;
}

void BM_trial_full(benchmark::State& state) {
  uf::TrialConfig cfg = base_config("honeypot");
  cfg.blocklist = uf::BlockList{};
  for (auto _ : state) {
    uf::TrialResult r = uf::run_trial(cfg);
    benchmark::DoNotOptimize(r.executions);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(cfg.duration_ms));
}
BENCHMARK(BM_trial_full)->Unit(benchmark::kMillisecond);

void BM_trial_partial(benchmark::State& state) {
  const uf::TargetProgram& target = uf::find_target("honeypot");
  uf::TrialConfig cfg = base_config("honeypot");
  cfg.blocklist = uf::compute_blocklist(target.callgraph, target.unsafe_manifest).blocklist;
  for (auto _ : state) {
    uf::TrialResult r = uf::run_trial(cfg);
    benchmark::DoNotOptimize(r.executions);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(cfg.duration_ms));
}
BENCHMARK(BM_trial_partial)->Unit(benchmark::kMillisecond);

void BM_mutate(benchmark::State& state) {
  uf::Rng rng(99);
  std::vector<uf::Seed> corpus;
  corpus.push_back({std::vector<uint8_t>(64, 0x41), 0, 0});
  corpus.push_back({std::vector<uint8_t>(256, 0x42), 0, 0});
  std::vector<uint8_t> input(128, 0x2a);
  for (auto _ : state) {
    std::vector<uint8_t> mutant = uf::mutate(input, rng, corpus);
    benchmark::DoNotOptimize(mutant.size());
  }
}
BENCHMARK(BM_mutate);

}  // namespace

BENCHMARK_MAIN();
