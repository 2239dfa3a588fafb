#include "uf/callgraph.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>

#include "uf/errors.hpp"

namespace uf {

bool is_valid_symbol(std::string_view symbol) {
  if (symbol.empty()) return false;
  return symbol.find_first_of("\t\n\r") == std::string_view::npos;
}

namespace {

[[noreturn]] void parse_fail(size_t line, const std::string& what) {
  throw ParseError("edge list line " + std::to_string(line) + ": " + what);
}

}  // namespace

CallGraph parse_edgelist(std::string_view text) {
  CallGraph g;
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

    size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      if (!is_valid_symbol(line)) parse_fail(line_no, "empty symbol");
      if (line == kIndirectToken) parse_fail(line_no, "reserved token <indirect> as node");
      g.nodes.insert(FunctionId(line));
      continue;
    }
    std::string_view caller = line.substr(0, tab);
    std::string_view callee = line.substr(tab + 1);
    if (callee.find('\t') != std::string_view::npos)
      parse_fail(line_no, "expected two tab-separated fields");
    if (!is_valid_symbol(caller)) parse_fail(line_no, "empty caller symbol");
    if (caller == kIndirectToken) parse_fail(line_no, "reserved token <indirect> as caller");
    if (callee.empty()) parse_fail(line_no, "empty callee symbol");

    g.nodes.insert(FunctionId(caller));
    if (callee == kIndirectToken) {
      g.indirect_sites.insert(FunctionId(caller));
    } else {
      g.nodes.insert(FunctionId(callee));
      g.edges.emplace(FunctionId(caller), FunctionId(callee));
    }
  }
  return g;
}

std::string serialize_edgelist(const CallGraph& g) {
  std::vector<std::string> lines;
  lines.reserve(g.edges.size() + g.indirect_sites.size());
  std::set<FunctionId> mentioned;
  for (const auto& [caller, callee] : g.edges) {
    lines.push_back(caller + '\t' + callee);
    mentioned.insert(caller);
    mentioned.insert(callee);
  }
  for (const auto& site : g.indirect_sites) {
    lines.push_back(site + '\t' + std::string(kIndirectToken));
    mentioned.insert(site);
  }
  for (const auto& node : g.nodes) {
    if (!mentioned.count(node)) lines.push_back(node);
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

namespace {

// Minimal DOT tokenizer: identifiers, quoted strings, punctuation.
// Comments (//, /* */, #) are skipped.
struct DotToken {
  enum Kind { Ident, String, Punct, Arrow, End } kind = End;
  std::string text;  // identifier or unescaped string contents
  char punct = 0;
};

class DotLexer {
 public:
  explicit DotLexer(std::string_view src) : src_(src) {}

  DotToken next() {
    skip_space_and_comments();
    DotToken t;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (c == '"') {
      ++pos_;
      t.kind = DotToken::String;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
        t.text += src_[pos_++];
      }
      if (pos_ >= src_.size()) throw ParseError("dot: unterminated string literal");
      ++pos_;
      return t;
    }
    if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      pos_ += 2;
      t.kind = DotToken::Arrow;
      return t;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
      t.kind = DotToken::Ident;
      while (pos_ < src_.size()) {
        char d = src_[pos_];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
          t.text += d;
          ++pos_;
        } else {
          break;
        }
      }
      return t;
    }
    t.kind = DotToken::Punct;
    t.punct = c;
    ++pos_;
    return t;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        pos_ += 2;
        while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) ++pos_;
        if (pos_ + 1 >= src_.size()) throw ParseError("dot: unterminated block comment");
        pos_ += 2;
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  size_t pos_ = 0;
};

bool is_external_label(const std::string& label) {
  return label.empty() || label == "external node";
}

// Strips the record-shape braces LLVM puts around labels: "{sym}" -> "sym".
std::string strip_braces(std::string label) {
  if (label.size() >= 2 && label.front() == '{' && label.back() == '}')
    return label.substr(1, label.size() - 2);
  return label;
}

}  // namespace

CallGraph parse_dot(std::string_view text) {
  DotLexer lex(text);
  DotToken tok = lex.next();
  if (tok.kind != DotToken::Ident || tok.text != "digraph")
    throw ParseError("dot: expected 'digraph'");
  tok = lex.next();
  if (tok.kind == DotToken::Ident || tok.kind == DotToken::String) tok = lex.next();
  if (tok.kind != DotToken::Punct || tok.punct != '{')
    throw ParseError("dot: expected '{' after digraph header");

  std::map<std::string, std::optional<std::string>> labels;  // node id -> label
  std::vector<std::pair<std::string, std::string>> raw_edges;
  std::set<std::string> declared;

  auto parse_attr_list = [&]() -> std::optional<std::string> {
    // Cursor already past '['. Returns the label attribute if present.
    std::optional<std::string> label;
    std::string key;
    enum { Key, Eq, Value } state = Key;
    for (;;) {
      DotToken t = lex.next();
      if (t.kind == DotToken::End) throw ParseError("dot: unterminated attribute list");
      if (t.kind == DotToken::Punct && t.punct == ']') return label;
      if (t.kind == DotToken::Punct && t.punct == ',') {
        state = Key;
        continue;
      }
      switch (state) {
        case Key:
          if (t.kind != DotToken::Ident && t.kind != DotToken::String)
            throw ParseError("dot: expected attribute name");
          key = t.text;
          state = Eq;
          break;
        case Eq:
          if (t.kind != DotToken::Punct || t.punct != '=')
            throw ParseError("dot: expected '=' in attribute");
          state = Value;
          break;
        case Value:
          if (key == "label") label = strip_braces(t.text);
          state = Key;
          break;
      }
    }
  };

  bool closed = false;
  for (;;) {
    DotToken t = lex.next();
    if (t.kind == DotToken::End) break;
    if (t.kind == DotToken::Punct && t.punct == '}') {
      closed = true;
      break;
    }
    if (t.kind == DotToken::Punct && t.punct == ';') continue;

    if (t.kind == DotToken::Ident &&
        (t.text == "graph" || t.text == "node" || t.text == "edge")) {
      DotToken nxt = lex.next();
      if (nxt.kind == DotToken::Punct && nxt.punct == '[') {
        parse_attr_list();
        continue;
      }
      if (nxt.kind == DotToken::Punct && nxt.punct == '=') {
        lex.next();  // attribute value, e.g. graph=...
        continue;
      }
      throw ParseError("dot: malformed default-attribute statement");
    }

    if (t.kind != DotToken::Ident && t.kind != DotToken::String)
      throw ParseError("dot: unexpected token in statement position");

    std::string id = t.text;
    declared.insert(id);
    labels.emplace(id, std::nullopt);

    DotToken nxt = lex.next();
    // key = value graph attribute, e.g. rankdir=LR;
    if (nxt.kind == DotToken::Punct && nxt.punct == '=') {
      lex.next();
      declared.erase(id);
      continue;
    }
    while (nxt.kind == DotToken::Arrow) {
      DotToken rhs = lex.next();
      if (rhs.kind != DotToken::Ident && rhs.kind != DotToken::String)
        throw ParseError("dot: expected node id after '->'");
      declared.insert(rhs.text);
      labels.emplace(rhs.text, std::nullopt);
      raw_edges.emplace_back(id, rhs.text);
      id = rhs.text;
      nxt = lex.next();
    }
    if (nxt.kind == DotToken::Punct && nxt.punct == '[') {
      auto label = parse_attr_list();
      if (label) {
        auto& slot = labels[id];
        if (slot && *slot != *label)
          throw ParseError("dot: node '" + id + "' labeled twice inconsistently");
        slot = label;
      }
      continue;
    }
    if (nxt.kind == DotToken::Punct && (nxt.punct == ';' || nxt.punct == '}')) {
      if (nxt.punct == '}') {
        closed = true;
        break;
      }
      continue;
    }
    if (nxt.kind == DotToken::End) break;
    throw ParseError("dot: unexpected token after statement");
  }
  if (!closed) throw ParseError("dot: missing closing '}'");

  // Resolve node ids to symbols. Unlabeled nodes use their id as symbol.
  std::map<std::string, std::string> symbol_of;  // node id -> symbol ("" = external)
  std::map<std::string, std::string> owner_of_label;
  for (const auto& id : declared) {
    const auto& label = labels.at(id);
    std::string sym = label ? *label : id;
    if (label && is_external_label(*label)) sym.clear();
    if (!sym.empty()) {
      auto [it, inserted] = owner_of_label.emplace(sym, id);
      if (!inserted && it->second != id)
        throw ParseError("dot: duplicate label '" + sym + "' on distinct nodes");
      if (!is_valid_symbol(sym))
        throw ParseError("dot: label '" + sym + "' is not a valid symbol");
    }
    symbol_of[id] = std::move(sym);
  }

  CallGraph g;
  for (const auto& [id, sym] : symbol_of) {
    if (!sym.empty()) g.nodes.insert(sym);
  }
  for (const auto& [from, to] : raw_edges) {
    const std::string& caller = symbol_of.at(from);
    const std::string& callee = symbol_of.at(to);
    if (caller.empty()) continue;  // edges out of the external node carry no call
    if (callee.empty()) {
      g.indirect_sites.insert(caller);
    } else {
      g.edges.emplace(caller, callee);
    }
  }
  return g;
}

CallGraph merge(const std::vector<CallGraph>& graphs) {
  CallGraph out;
  for (const auto& g : graphs) {
    out.nodes.insert(g.nodes.begin(), g.nodes.end());
    out.edges.insert(g.edges.begin(), g.edges.end());
    out.indirect_sites.insert(g.indirect_sites.begin(), g.indirect_sites.end());
  }
  return out;
}

CallGraph reverse(const CallGraph& g) {
  CallGraph out;
  out.nodes = g.nodes;
  out.indirect_sites = g.indirect_sites;
  for (const auto& [caller, callee] : g.edges) out.edges.emplace(callee, caller);
  return out;
}

}  // namespace uf
