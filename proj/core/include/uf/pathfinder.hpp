#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "uf/callgraph.hpp"
#include "uf/unsafescan.hpp"

namespace uf {

// Functions whose instrumentation a fuzzer should ignore: no call path from
// any of them reaches a function that performs unsafe operations.
struct BlockList {
  std::set<FunctionId> functions;

  bool contains(const FunctionId& f) const { return functions.count(f) != 0; }
  bool operator==(const BlockList&) const = default;
};

enum class BlocklistMode {
  // A function is blocked iff no directed path from it reaches a manifest
  // function present in the graph.
  Standard,
  // Additionally treats every function containing an indirect call site as
  // if it could reach unsafe code, since the callee set is unknown.
  ConservativeIndirect,
};

struct PathfinderStats {
  size_t total_nodes = 0;
  size_t unsafe_in_graph = 0;    // manifest functions found among graph nodes
  size_t manifest_missing = 0;   // manifest functions absent from the graph
  size_t blocked = 0;
  double blocked_fraction = 0.0; // blocked / total_nodes (0 when graph empty)
};

struct PathfinderResult {
  BlockList blocklist;
  PathfinderStats stats;
  std::vector<std::string> warnings;
};

// Computes the block list by walking the call graph backwards from every
// manifest function that appears in it. Nodes never visited by that walk
// cannot reach unsafe code and are blocked. Manifest functions missing from
// the graph produce a warning each and are otherwise ignored.
PathfinderResult compute_blocklist(const CallGraph& graph, const UnsafeManifest& manifest,
                                   BlocklistMode mode = BlocklistMode::Standard);

// Fraction of graph nodes that keep their instrumentation (1 - blocked_fraction).
double coverage_fraction(const PathfinderStats& stats);

enum class BlocklistFormat {
  Plain,       // one symbol per line, sorted
  AflDenylist, // "fun: <symbol>" per line, sorted, for AFL_LLVM_DENYLIST
};

std::string write_blocklist(const BlockList& list, BlocklistFormat format);

// Accepts either serialization; lines decide their own format, so mixed
// files load too. '#' comments and blank lines are ignored.
BlockList load_blocklist(std::string_view text);

}  // namespace uf
