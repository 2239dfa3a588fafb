#include "uf/unsafescan.hpp"

#include <cctype>
#include <optional>

#include "uf/errors.hpp"

namespace uf {

UnsafeManifest load_manifest(std::string_view text) {
  UnsafeManifest m;
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
    if (line.find('\t') != std::string_view::npos)
      throw ParseError("manifest line " + std::to_string(line_no) + ": symbol contains tab");
    m.functions.insert(FunctionId(line));
  }
  return m;
}

std::string write_manifest(const UnsafeManifest& m) {
  std::string out;
  for (const auto& symbol : m.functions) {
    out += symbol;
    out += '\n';
  }
  return out;
}

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

struct Token {
  enum Kind { Ident, RawIdent, Punct } kind;
  std::string_view text;  // identifier text (keyword check) or punct char
  size_t line;
};

// Tokenizes one Rust source file just far enough to find keyword tokens and
// brace structure. Comments, strings (incl. raw and byte forms), char
// literals and lifetimes are consumed so their contents never surface.
class RustLexer {
 public:
  RustLexer(std::string_view src, const std::string& path) : src_(src), path_(path) {}

  std::vector<Token> run() {
    std::vector<Token> toks;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
        continue;
      }
      if (c == '/' && peek(1) == '/') {
        skip_to_eol();
        continue;
      }
      if (c == '/' && peek(1) == '*') {
        skip_block_comment();
        continue;
      }
      if (c == '"') {
        skip_string();
        continue;
      }
      if (c == '\'') {
        skip_char_or_lifetime();
        continue;
      }
      if (is_ident_start(c)) {
        lex_ident_or_literal_prefix(toks);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        // Number literals can carry type suffixes (1usize); consume greedily.
        while (pos_ < src_.size() && (is_ident_char(src_[pos_]) || src_[pos_] == '.'))
          ++pos_;
        continue;
      }
      toks.push_back({Token::Punct, src_.substr(pos_, 1), line_});
      ++pos_;
    }
    return toks;
  }

 private:
  char peek(size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void skip_to_eol() {
    while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
  }

  void skip_block_comment() {
    pos_ += 2;
    int depth = 1;
    while (pos_ < src_.size() && depth > 0) {
      if (src_[pos_] == '/' && peek(1) == '*') {
        depth++;
        pos_ += 2;
      } else if (src_[pos_] == '*' && peek(1) == '/') {
        depth--;
        pos_ += 2;
      } else {
        if (src_[pos_] == '\n') ++line_;
        ++pos_;
      }
    }
    if (depth != 0) throw ScanError(path_ + ": unterminated block comment");
  }

  void skip_string() {
    ++pos_;  // opening quote
    while (pos_ < src_.size() && src_[pos_] != '"') {
      if (src_[pos_] == '\\') ++pos_;
      if (pos_ < src_.size() && src_[pos_] == '\n') ++line_;
      ++pos_;
    }
    if (pos_ >= src_.size()) throw ScanError(path_ + ": unterminated string literal");
    ++pos_;  // closing quote
  }

  void skip_raw_string(size_t hashes) {
    ++pos_;  // opening quote
    const std::string closer = '"' + std::string(hashes, '#');
    size_t end = src_.find(closer, pos_);
    if (end == std::string_view::npos)
      throw ScanError(path_ + ": unterminated raw string literal");
    for (size_t i = pos_; i < end; ++i)
      if (src_[i] == '\n') ++line_;
    pos_ = end + closer.size();
  }

  void skip_char_or_lifetime() {
    ++pos_;  // opening quote
    if (pos_ >= src_.size()) throw ScanError(path_ + ": dangling quote");
    if (src_[pos_] == '\\') {
      // Escaped char literal: skip escape body to the closing quote.
      ++pos_;
      while (pos_ < src_.size() && src_[pos_] != '\'') ++pos_;
      if (pos_ >= src_.size()) throw ScanError(path_ + ": unterminated char literal");
      ++pos_;
      return;
    }
    if (is_ident_start(src_[pos_])) {
      // 'a' is a char literal; 'a without a closing quote is a lifetime.
      size_t scan = pos_;
      while (scan < src_.size() && is_ident_char(src_[scan])) ++scan;
      if (scan < src_.size() && src_[scan] == '\'') {
        pos_ = scan + 1;  // char literal
      } else {
        pos_ = scan;  // lifetime, no closing quote
      }
      return;
    }
    // Punctuation char literal, e.g. '(' or '0'.
    ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '\'') ++pos_;
  }

  void lex_ident_or_literal_prefix(std::vector<Token>& toks) {
    size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    std::string_view ident = src_.substr(start, pos_ - start);

    if ((ident == "r" || ident == "br") && pos_ < src_.size()) {
      if (src_[pos_] == '"') {
        skip_raw_string(0);
        return;
      }
      if (src_[pos_] == '#') {
        size_t hashes = 0;
        while (pos_ < src_.size() && src_[pos_] == '#') {
          ++hashes;
          ++pos_;
        }
        if (pos_ < src_.size() && src_[pos_] == '"') {
          skip_raw_string(hashes);
          return;
        }
        if (ident == "r" && hashes == 1 && pos_ < src_.size() && is_ident_start(src_[pos_])) {
          // Raw identifier r#name: never a keyword.
          size_t name_start = pos_;
          while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
          toks.push_back({Token::RawIdent, src_.substr(name_start, pos_ - name_start), line_});
          return;
        }
        throw ScanError(path_ + ": stray '#' after r prefix");
      }
    }
    if (ident == "b" && pos_ < src_.size() && src_[pos_] == '"') {
      skip_string();
      return;
    }
    toks.push_back({Token::Ident, ident, line_});
  }

  std::string_view src_;
  const std::string& path_;
  size_t pos_ = 0;
  size_t line_ = 1;
};

// Walks the token stream of one file, attributing unsafe tokens to the
// function whose body encloses them (innermost `fn` by brace depth).
class FileScanner {
 public:
  FileScanner(const SourceFile& file, UnsafeManifest& manifest,
              std::vector<std::string>& warnings)
      : file_(file), manifest_(manifest), warnings_(warnings) {}

  void run() {
    auto toks = RustLexer(file_.text, file_.path).run();
    for (size_t i = 0; i < toks.size(); ++i) {
      const Token& t = toks[i];
      if (t.kind == Token::Ident && t.text == "unsafe") {
        handle_unsafe(toks, i);
        continue;
      }
      if (t.kind == Token::Ident || t.kind == Token::RawIdent) {
        if (awaiting_fn_name_) {
          pending_fn_ = std::string(t.text);
          awaiting_fn_name_ = false;
          if (mark_next_fn_) {
            manifest_.functions.insert(*pending_fn_);
            mark_next_fn_ = false;
          }
          continue;
        }
        if (t.kind == Token::Ident && t.text == "fn") {
          awaiting_fn_name_ = true;
          continue;
        }
        continue;
      }
      // Punct
      char c = t.text[0];
      if (awaiting_fn_name_) {
        // `fn(` is a function-pointer type, not a declaration.
        awaiting_fn_name_ = false;
        if (mark_next_fn_) {
          mark_enclosing_or_toplevel(t.line);
          mark_next_fn_ = false;
        }
      }
      if (c == '{') {
        ++depth_;
        if (pending_fn_) {
          fn_stack_.push_back({*pending_fn_, depth_});
          pending_fn_.reset();
        }
      } else if (c == '}') {
        if (depth_ == 0)
          throw ScanError(file_.path + ": unbalanced braces at end of file");
        if (!fn_stack_.empty() && fn_stack_.back().body_depth == depth_)
          fn_stack_.pop_back();
        --depth_;
      } else if (c == ';') {
        // Bodyless declaration (trait method, extern fn).
        pending_fn_.reset();
      }
    }
    if (depth_ != 0)
      throw ScanError(file_.path + ": unbalanced braces at end of file");
  }

 private:
  struct ActiveFn {
    std::string name;
    size_t body_depth;
  };

  void handle_unsafe(const std::vector<Token>& toks, size_t i) {
    // Peek past `extern` so `unsafe extern "C" fn` still marks the fn (the
    // ABI string never reaches the token stream).
    size_t j = i + 1;
    while (j < toks.size() && toks[j].kind == Token::Ident && toks[j].text == "extern") ++j;
    if (j < toks.size() && toks[j].kind == Token::Ident) {
      if (toks[j].text == "fn") {
        mark_next_fn_ = true;
        return;
      }
      if (toks[j].text == "impl" || toks[j].text == "trait") {
        warnings_.push_back(file_.path + ":" + std::to_string(toks[i].line) +
                            ": `unsafe " + std::string(toks[j].text) +
                            "` asserts a property and marks no function");
        return;
      }
    }
    mark_enclosing_or_toplevel(toks[i].line);
  }

  void mark_enclosing_or_toplevel(size_t line) {
    if (!fn_stack_.empty()) {
      manifest_.functions.insert(fn_stack_.back().name);
      return;
    }
    std::string synthetic = "<toplevel:" + file_.path + ">";
    manifest_.functions.insert(synthetic);
    warnings_.push_back(file_.path + ":" + std::to_string(line) +
                        ": unsafe outside any function, recorded as " + synthetic);
  }

  const SourceFile& file_;
  UnsafeManifest& manifest_;
  std::vector<std::string>& warnings_;
  size_t depth_ = 0;
  std::vector<ActiveFn> fn_stack_;
  std::optional<std::string> pending_fn_;
  bool awaiting_fn_name_ = false;
  bool mark_next_fn_ = false;
};

}  // namespace

ScanResult scan_source(const std::vector<SourceFile>& files) {
  ScanResult result;
  for (const auto& file : files) {
    FileScanner(file, result.manifest, result.warnings).run();
  }
  return result;
}

}  // namespace uf
