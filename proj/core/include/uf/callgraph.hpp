#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace uf {

/// A function symbol (mangled or plain). Non-empty, no tab or newline.
using FunctionId = std::string;

/// Callee token marking an unresolved indirect call site in edge-list files.
inline constexpr std::string_view kIndirectToken = "<indirect>";

bool is_valid_symbol(std::string_view symbol);

/// Directed whole-program call graph. Functions containing at least one
/// unresolved indirect call are listed in indirect_sites rather than getting
/// edges to a dummy node, so the path finder can treat them conservatively.
struct CallGraph {
  std::set<FunctionId> nodes;
  std::set<std::pair<FunctionId, FunctionId>> edges;
  std::set<FunctionId> indirect_sites;

  bool operator==(const CallGraph&) const = default;
};

/// Parses the tab-separated edge-list format:
///   caller<TAB>callee       one call edge
///   caller<TAB><indirect>   caller contains an unresolved indirect call
///   symbol                  isolated node (no calls in either direction)
/// Blank lines and lines starting with '#' are ignored.
/// Throws ParseError with a line number on malformed input.
CallGraph parse_edgelist(std::string_view text);

/// Canonical serialization: one line per edge, indirect site, and otherwise
/// unmentioned node, lexicographically sorted, LF endings.
/// parse_edgelist(serialize_edgelist(g)) == g for every graph.
std::string serialize_edgelist(const CallGraph& g);

/// Parses the DOT subset emitted by LLVM-style call-graph dumps:
///   digraph "..." { NodeId [label="{symbol}"]; NodeId -> NodeId; }
/// Nodes labeled "external node" (or with an empty label) are unresolved;
/// edges into them mark the caller as an indirect site. Duplicate labels on
/// distinct node ids are a ParseError.
CallGraph parse_dot(std::string_view text);

/// Union of nodes, edges and indirect sites; symbols are the join keys.
CallGraph merge(const std::vector<CallGraph>& graphs);

/// Same nodes, every edge flipped, indirect sites preserved.
CallGraph reverse(const CallGraph& g);

}  // namespace uf
