#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "uf/callgraph.hpp"
#include "uf/pathfinder.hpp"

namespace uf {

inline constexpr uint32_t kDefaultMapSize = 65536;

// Power of two, at least 256, small enough to allocate without surprises.
bool is_valid_map_size(uint64_t size);

// One observed control-flow edge. `function` views storage owned by the
// target (or a literal in tests); traces never outlive their target.
struct TraceEvent {
  std::string_view function;
  uint32_t edge_index = 0;

  bool operator==(const TraceEvent&) const = default;
};

struct ExecutionTrace {
  std::vector<TraceEvent> events;
  // Oracle ids satisfied by this input; targets emit each id at most once.
  std::vector<std::string_view> oracle_hits;
  bool crashed = false;

  void clear() {
    events.clear();
    oracle_hits.clear();
    crashed = false;
  }
};

// Deterministic edge → guard-slot assignment: functions in symbol order,
// edges in index order, ids dense from zero, wrapping modulo map_size.
// Blocked functions receive no guards at all.
struct GuardTable {
  std::map<FunctionId, std::vector<uint32_t>, std::less<>> assignment;
  std::set<FunctionId, std::less<>> blocked;
  uint32_t map_size = kDefaultMapSize;
  size_t total_edges = 0;  // edges that received a guard
  bool wrapped = false;    // total_edges exceeded map_size; collisions present
};

GuardTable allocate_guards(const std::map<FunctionId, uint32_t>& function_edge_counts,
                           const BlockList& blocklist, uint32_t map_size = kDefaultMapSize);

// Build that has no notion of a block list: instruments everything. Kept as
// a separate code path so equivalence with an empty block list is a claim
// tests can check rather than assume.
GuardTable allocate_guards(const std::map<FunctionId, uint32_t>& function_edge_counts,
                           uint32_t map_size = kDefaultMapSize);

// Fixed-size array of 8-bit saturating hit counters.
class CoverageMap {
 public:
  explicit CoverageMap(uint32_t map_size);

  uint32_t size() const { return static_cast<uint32_t>(hits_.size()); }
  uint8_t operator[](uint32_t guard) const { return hits_[guard]; }
  const uint8_t* data() const { return hits_.data(); }

  void increment(uint32_t guard) {
    uint8_t& h = hits_[guard];
    if (h != 255) ++h;
  }

  void reset();
  // Cheaper reset when the caller knows which guards a run touched.
  void reset_slots(const std::vector<uint32_t>& guards);

 private:
  std::vector<uint8_t> hits_;
};

// Applies a trace to the map. Events of blocked functions are ignored;
// events referencing a function or edge index the table has never heard of
// are a harness/table mismatch and throw ConfigError. When `touched` is
// given, every incremented guard id is appended (duplicates possible).
void apply_trace(CoverageMap& map, const GuardTable& table, const ExecutionTrace& trace,
                 std::vector<uint32_t>* touched = nullptr);

// Classic 8-bucket hit-count classing: {0},{1},{2},{3},{4-7},{8-15},{16-31},
// {32-127},{128-255} -> indices 0..8.
inline uint32_t bucketize(uint8_t count) {
  if (count < 4) return count;
  if (count < 8) return 4;
  if (count < 16) return 5;
  if (count < 32) return 6;
  if (count < 128) return 7;
  return 8;
}

// Per-guard set of buckets observed across all runs so far, as bitmasks.
class BucketSummary {
 public:
  explicit BucketSummary(uint32_t map_size) : seen_(map_size, 0) {}

  uint32_t size() const { return static_cast<uint32_t>(seen_.size()); }
  uint16_t buckets_seen(uint32_t guard) const { return seen_[guard]; }

  // Records one observation; true when that bucket was new for the guard.
  bool record(uint32_t guard, uint32_t bucket) {
    uint16_t bit = static_cast<uint16_t>(1u << bucket);
    if (seen_[guard] & bit) return false;
    seen_[guard] |= bit;
    return true;
  }

 private:
  std::vector<uint16_t> seen_;
};

struct NoveltyResult {
  bool is_novel = false;
  size_t grown_guards = 0;  // guards whose bucket set grew this run
};

// A run is novel iff some guard's bucketized count lands in a bucket never
// recorded for that guard. Zero counters never participate. The summary is
// updated with everything observed.
NoveltyResult novelty_check(BucketSummary& summary, const CoverageMap& run_map);

// Same result computed from the touched-guard list instead of a full map
// scan; the fuzzing loop's fast path. Duplicate ids are fine.
NoveltyResult novelty_check(BucketSummary& summary, const CoverageMap& run_map,
                            const std::vector<uint32_t>& touched);

// Diagnostic: offset-prefixed hex dump, 16 counters per line, all-zero
// lines collapsed to a single '*'.
std::string hex_dump(const CoverageMap& map);

}  // namespace uf
