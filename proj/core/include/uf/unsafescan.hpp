#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "uf/callgraph.hpp"

namespace uf {

/// Set of function symbols that contain unsafe code.
struct UnsafeManifest {
  std::set<FunctionId> functions;

  bool operator==(const UnsafeManifest&) const = default;
};

/// One symbol per line; '#' comments and blank lines allowed; duplicates
/// collapse. Throws ParseError on symbols containing tab characters.
UnsafeManifest load_manifest(std::string_view text);

/// One symbol per line, sorted, LF endings. load_manifest(write_manifest(m)) == m.
std::string write_manifest(const UnsafeManifest& m);

struct SourceFile {
  std::string path;
  std::string text;
};

struct ScanResult {
  UnsafeManifest manifest;
  std::vector<std::string> warnings;
};

/// Lexical scan of Rust sources for the `unsafe` keyword. Marks `unsafe fn`
/// declarations and every function whose body contains the token; skips the
/// token inside comments (nested block comments included), string and char
/// literals, raw strings, and identifiers that merely contain the substring.
///
/// `unsafe impl` / `unsafe trait` assert properties rather than containing
/// unsafe operations; they produce a warning and mark nothing. Any other
/// unsafe token outside a function body is recorded under the synthetic
/// symbol `<toplevel:path>` and warned about.
///
/// This is a source-level stand-in for a compiler pass: it sees generic
/// functions once, not their monomorphized instances, and does not expand
/// macros or resolve cfg attributes.
ScanResult scan_source(const std::vector<SourceFile>& files);

}  // namespace uf
