#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "uf/callgraph.hpp"
#include "uf/coverage.hpp"
#include "uf/unsafescan.hpp"

namespace uf {

inline constexpr size_t kMaxInputLen = 4096;

struct OracleSite {
  std::string id;
  FunctionId function;  // always a manifest function
};

// An in-process stand-in for a compiled, instrumented fuzz target. `step`
// is a pure function of the input bytes; it appends (function, edge_index)
// events, oracle hits, and the crash flag to the trace. Every target ships
// the call graph, manifest and sources its block list derives from, so the
// scan -> pathfind -> fuzz pipeline runs end to end on bundled data alone.
struct TargetProgram {
  std::string name;
  std::string description;
  std::map<FunctionId, uint32_t> functions;  // symbol -> edge count
  CallGraph callgraph;
  UnsafeManifest unsafe_manifest;
  std::vector<OracleSite> oracles;
  std::vector<SourceFile> sources;
  std::vector<std::vector<uint8_t>> default_corpus;
  size_t max_input_len = kMaxInputLen;
  void (*step)(const uint8_t* data, size_t len, ExecutionTrace& out) = nullptr;

  // Throws InputTooLongError for inputs over max_input_len; a rejected
  // input is not a crash.
  ExecutionTrace execute(const std::vector<uint8_t>& input) const;
  // Same semantics, reusing the trace's buffers (cleared first).
  void execute_into(const uint8_t* data, size_t len, ExecutionTrace& out) const;
};

// Bundled targets, constructed once. Order is fixed: gatekeeper, honeypot,
// multi_oracle.
const std::vector<TargetProgram>& list_targets();

// Throws ConfigError when no bundled target has that name.
const TargetProgram& find_target(std::string_view name);

}  // namespace uf
