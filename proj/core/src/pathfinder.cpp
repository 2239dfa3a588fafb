#include "uf/pathfinder.hpp"

#include <deque>
#include <map>

#include "uf/errors.hpp"

namespace uf {

PathfinderResult compute_blocklist(const CallGraph& graph, const UnsafeManifest& manifest,
                                   BlocklistMode mode) {
  PathfinderResult result;
  result.stats.total_nodes = graph.nodes.size();

  // Reverse adjacency: callee -> callers.
  std::map<FunctionId, std::vector<const FunctionId*>> callers;
  for (const auto& [caller, callee] : graph.edges)
    callers[callee].push_back(&caller);

  std::set<FunctionId> seeds;
  for (const auto& f : manifest.functions) {
    if (graph.nodes.count(f)) {
      seeds.insert(f);
      ++result.stats.unsafe_in_graph;
    } else {
      ++result.stats.manifest_missing;
      result.warnings.push_back("manifest function not in call graph: " + f);
    }
  }
  if (mode == BlocklistMode::ConservativeIndirect) {
    for (const auto& f : graph.indirect_sites)
      if (graph.nodes.count(f)) seeds.insert(f);
  }

  std::set<FunctionId> reaches_unsafe = seeds;
  std::deque<FunctionId> frontier(seeds.begin(), seeds.end());
  while (!frontier.empty()) {
    FunctionId f = std::move(frontier.front());
    frontier.pop_front();
    auto it = callers.find(f);
    if (it == callers.end()) continue;
    for (const FunctionId* caller : it->second) {
      if (reaches_unsafe.insert(*caller).second) frontier.push_back(*caller);
    }
  }

  for (const auto& node : graph.nodes)
    if (!reaches_unsafe.count(node)) result.blocklist.functions.insert(node);

  result.stats.blocked = result.blocklist.functions.size();
  result.stats.blocked_fraction =
      result.stats.total_nodes == 0
          ? 0.0
          : static_cast<double>(result.stats.blocked) / static_cast<double>(result.stats.total_nodes);
  return result;
}

double coverage_fraction(const PathfinderStats& stats) {
  return 1.0 - stats.blocked_fraction;
}

std::string write_blocklist(const BlockList& list, BlocklistFormat format) {
  std::string out;
  for (const auto& symbol : list.functions) {
    if (format == BlocklistFormat::AflDenylist) out += "fun: ";
    out += symbol;
    out += '\n';
  }
  return out;
}

BlockList load_blocklist(std::string_view text) {
  BlockList list;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) {
      if (pos == text.size()) break;
      eol = text.size();
    }
    ++line_no;
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (line.substr(0, 5) == "fun: ") line.remove_prefix(5);
    if (line.empty() || line.find('\t') != std::string_view::npos ||
        line.find(' ') != std::string_view::npos)
      throw ParseError("blocklist line " + std::to_string(line_no) + ": malformed symbol");
    list.functions.insert(FunctionId(line));
  }
  return list;
}

}  // namespace uf
