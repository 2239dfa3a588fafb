#pragma once

// Brute-force reachability reference for cross-checking compute_blocklist.
//
// Deliberately implemented on a different principle than the production code
// (which runs breadth-first search on the reversed graph): this enumerates
// simple paths forward from each node with a plain recursive walk. Exponential
// in the worst case, so callers keep graphs small (<= ~12 nodes).

#include <map>
#include <set>
#include <string>
#include <vector>

#include "uf/callgraph.hpp"
#include "uf/pathfinder.hpp"
#include "uf/unsafescan.hpp"

namespace testsupport {

namespace detail {

inline bool walk_reaches(const uf::FunctionId& node,
                         const std::map<uf::FunctionId, std::vector<uf::FunctionId>>& succ,
                         const std::set<uf::FunctionId>& goals,
                         std::set<uf::FunctionId>& on_path) {
  auto it = succ.find(node);
  if (it == succ.end()) return false;
  for (const auto& next : it->second) {
    if (goals.count(next)) return true;
    if (!on_path.insert(next).second) continue;  // keep the path simple
    bool hit = walk_reaches(next, succ, goals, on_path);
    on_path.erase(next);
    if (hit) return true;
  }
  return false;
}

}  // namespace detail

// Computes the blocked set from first principles: a node is blocked iff it is
// not an unsafe seed itself and no simple path from it ends at a seed.
// `extra_seeds` lets callers model conservative-indirect mode (indirect-call
// sites counted as possibly-unsafe).
inline std::set<uf::FunctionId> brute_force_blocked(
    const uf::CallGraph& g, const uf::UnsafeManifest& m,
    const std::set<uf::FunctionId>& extra_seeds = {}) {
  std::set<uf::FunctionId> goals;
  for (const auto& f : m.functions)
    if (g.nodes.count(f)) goals.insert(f);
  for (const auto& f : extra_seeds)
    if (g.nodes.count(f)) goals.insert(f);

  std::map<uf::FunctionId, std::vector<uf::FunctionId>> succ;
  for (const auto& [from, to] : g.edges) succ[from].push_back(to);

  std::set<uf::FunctionId> blocked;
  for (const auto& node : g.nodes) {
    if (goals.count(node)) continue;
    std::set<uf::FunctionId> on_path{node};
    if (!detail::walk_reaches(node, succ, goals, on_path)) blocked.insert(node);
  }
  return blocked;
}

inline std::set<uf::FunctionId> brute_force_blocked(
    const uf::CallGraph& g, const uf::UnsafeManifest& m, uf::BlocklistMode mode) {
  if (mode == uf::BlocklistMode::ConservativeIndirect)
    return brute_force_blocked(g, m, g.indirect_sites);
  return brute_force_blocked(g, m);
}

}  // namespace testsupport
