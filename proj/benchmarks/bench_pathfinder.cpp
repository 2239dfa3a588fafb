#include <benchmark/benchmark.h>

#include "uf/pathfinder.hpp"
#include "uf/rng.hpp"

namespace {

// Sparse random digraph with a small unsafe seed set, shaped like the call
// graphs the block-list computation sees in practice.
std::pair<uf::CallGraph, uf::UnsafeManifest> random_instance(size_t nodes, uint64_t seed) {
  uf::Rng rng(seed);
  uf::CallGraph g;
  std::vector<std::string> names(nodes);
  for (size_t i = 0; i < nodes; ++i) {
    names[i] = "fun_" + std::to_string(i);
    g.nodes.insert(names[i]);
  }
  const size_t edges = nodes * 3;
  for (size_t e = 0; e < edges; ++e) {
    const auto& a = names[rng.below(nodes)];
    const auto& b = names[rng.below(nodes)];
    g.edges.emplace(a, b);
  }
  uf::UnsafeManifest m;
  for (size_t u = 0; u < std::max<size_t>(1, nodes / 20); ++u)
    m.functions.insert(names[rng.below(nodes)]);
  return {std::move(g), std::move(m)};
}

void BM_compute_blocklist(benchmark::State& state) {
  auto [graph, manifest] = random_instance(static_cast<size_t>(state.range(0)), 42);
  for (auto _ : state) {
    uf::PathfinderResult r = uf::compute_blocklist(graph, manifest);
    benchmark::DoNotOptimize(r.stats.blocked);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_compute_blocklist)->Range(64, 8192)->Complexity();

void BM_compute_blocklist_conservative(benchmark::State& state) {
  auto [graph, manifest] = random_instance(static_cast<size_t>(state.range(0)), 43);
  uf::Rng rng(7);
  std::vector<std::string> nodes(graph.nodes.begin(), graph.nodes.end());
  for (size_t i = 0; i < nodes.size() / 10; ++i)
    graph.indirect_sites.insert(nodes[rng.below(nodes.size())]);
  for (auto _ : state) {
    uf::PathfinderResult r =
        uf::compute_blocklist(graph, manifest, uf::BlocklistMode::ConservativeIndirect);
    benchmark::DoNotOptimize(r.stats.blocked);
  }
}
BENCHMARK(BM_compute_blocklist_conservative)->Range(64, 8192);

}  // namespace

BENCHMARK_MAIN();
