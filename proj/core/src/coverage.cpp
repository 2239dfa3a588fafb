#include "uf/coverage.hpp"

#include <cstdio>
#include <cstring>

#include "uf/errors.hpp"

namespace uf {

bool is_valid_map_size(uint64_t size) {
  if (size < 256 || size > (1ull << 30)) return false;
  return (size & (size - 1)) == 0;
}

namespace {

GuardTable allocate_impl(const std::map<FunctionId, uint32_t>& function_edge_counts,
                         const std::set<FunctionId>* blocked, uint32_t map_size) {
  if (!is_valid_map_size(map_size))
    throw ConfigError("map size must be a power of two in [256, 2^30], got " +
                      std::to_string(map_size));
  GuardTable table;
  table.map_size = map_size;
  if (blocked) table.blocked.insert(blocked->begin(), blocked->end());
  uint32_t next_id = 0;
  for (const auto& [function, edge_count] : function_edge_counts) {
    if (blocked && blocked->count(function)) continue;
    std::vector<uint32_t> guards(edge_count);
    for (uint32_t e = 0; e < edge_count; ++e) guards[e] = next_id++ % map_size;
    table.assignment.emplace(function, std::move(guards));
    table.total_edges += edge_count;
  }
  table.wrapped = table.total_edges > map_size;
  return table;
}

}  // namespace

GuardTable allocate_guards(const std::map<FunctionId, uint32_t>& function_edge_counts,
                           const BlockList& blocklist, uint32_t map_size) {
  return allocate_impl(function_edge_counts, &blocklist.functions, map_size);
}

GuardTable allocate_guards(const std::map<FunctionId, uint32_t>& function_edge_counts,
                           uint32_t map_size) {
  return allocate_impl(function_edge_counts, nullptr, map_size);
}

CoverageMap::CoverageMap(uint32_t map_size) {
  if (!is_valid_map_size(map_size))
    throw ConfigError("map size must be a power of two in [256, 2^30], got " +
                      std::to_string(map_size));
  hits_.assign(map_size, 0);
}

void CoverageMap::reset() { std::memset(hits_.data(), 0, hits_.size()); }

void CoverageMap::reset_slots(const std::vector<uint32_t>& guards) {
  for (uint32_t g : guards) hits_[g] = 0;
}

void apply_trace(CoverageMap& map, const GuardTable& table, const ExecutionTrace& trace,
                 std::vector<uint32_t>* touched) {
  for (const TraceEvent& ev : trace.events) {
    auto it = table.assignment.find(ev.function);
    if (it == table.assignment.end()) {
      if (table.blocked.count(ev.function)) continue;
      throw ConfigError("trace event for unknown function: " + std::string(ev.function));
    }
    if (ev.edge_index >= it->second.size())
      throw ConfigError("trace event edge " + std::to_string(ev.edge_index) +
                        " out of range for function " + std::string(ev.function));
    uint32_t guard = it->second[ev.edge_index];
    map.increment(guard);
    if (touched) touched->push_back(guard);
  }
}

NoveltyResult novelty_check(BucketSummary& summary, const CoverageMap& run_map) {
  NoveltyResult result;
  const uint8_t* bytes = run_map.data();
  const uint32_t n = run_map.size();
  uint64_t word;
  // map sizes are multiples of 8, so whole-word strides are safe
  for (uint32_t base = 0; base < n; base += 8) {
    std::memcpy(&word, bytes + base, 8);
    if (word == 0) continue;
    for (uint32_t off = 0; off < 8; ++off) {
      uint8_t count = bytes[base + off];
      if (count == 0) continue;
      if (summary.record(base + off, bucketize(count))) {
        result.is_novel = true;
        ++result.grown_guards;
      }
    }
  }
  return result;
}

NoveltyResult novelty_check(BucketSummary& summary, const CoverageMap& run_map,
                            const std::vector<uint32_t>& touched) {
  NoveltyResult result;
  for (uint32_t guard : touched) {
    uint8_t count = run_map[guard];
    if (count == 0) continue;
    if (summary.record(guard, bucketize(count))) {
      result.is_novel = true;
      ++result.grown_guards;
    }
  }
  return result;
}

std::string hex_dump(const CoverageMap& map) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  bool in_gap = false;
  for (uint32_t base = 0; base < map.size(); base += 16) {
    bool all_zero = true;
    for (uint32_t off = 0; off < 16 && base + off < map.size(); ++off)
      if (map[base + off] != 0) {
        all_zero = false;
        break;
      }
    if (all_zero) {
      if (!in_gap) {
        out += "*\n";
        in_gap = true;
      }
      continue;
    }
    in_gap = false;
    char offset[16];
    std::snprintf(offset, sizeof offset, "%08x", base);
    out += offset;
    for (uint32_t off = 0; off < 16 && base + off < map.size(); ++off) {
      uint8_t b = map[base + off];
      out += ' ';
      out += digits[b >> 4];
      out += digits[b & 0xf];
    }
    out += '\n';
  }
  return out;
}

}  // namespace uf
