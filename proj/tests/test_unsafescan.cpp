#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <string>
#include <vector>

#include "support/rust_source_gen.hpp"
#include "uf/errors.hpp"
#include "uf/rng.hpp"
#include "uf/unsafescan.hpp"

using uf::ScanResult;
using uf::SourceFile;
using uf::UnsafeManifest;

namespace {

ScanResult scan_one(const std::string& text, const std::string& path = "lib.rs") {
  return uf::scan_source({SourceFile{path, text}});
}

std::set<std::string> names(const ScanResult& r) { return r.manifest.functions; }

}  // namespace

TEST_CASE("manifest load: symbols, duplicates, comments, CRLF") {
  CHECK(uf::load_manifest("f\ng\n").functions == std::set<std::string>{"f", "g"});
  CHECK(uf::load_manifest("f\nf\n").functions == std::set<std::string>{"f"});
  CHECK(uf::load_manifest("# comment\n").functions.empty());
  CHECK(uf::load_manifest("").functions.empty());
  CHECK(uf::load_manifest("a\r\nb").functions == std::set<std::string>{"a", "b"});
  CHECK_THROWS_AS(uf::load_manifest("a\tb\n"), uf::ParseError);
}

TEST_CASE("manifest write: sorted, LF, round-trip") {
  UnsafeManifest m;
  m.functions = {"b", "a"};
  CHECK(uf::write_manifest(m) == "a\nb\n");
  CHECK(uf::write_manifest(UnsafeManifest{}) == "");
  CHECK(uf::write_manifest(UnsafeManifest{{"f"}}) == "f\n");

  uf::Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    UnsafeManifest r;
    size_t n = rng.below(6);
    for (size_t k = 0; k < n; ++k) r.functions.insert("sym_" + std::to_string(rng.below(12)));
    CHECK(uf::load_manifest(uf::write_manifest(r)) == r);
  }
}

TEST_CASE("a safe wrapper with an unsafe block is marked; its caller is not") {
  // A bounds-skipping store behind a safe-looking method, plus a caller that
  // never spells the keyword itself.
  const std::string wrapper =
      "impl Buffer {\n"
      "    pub fn store_at(&mut self, index: usize, v: u8) {\n"
      "        let ptr = unsafe { self.data.as_mut_ptr().add(index) };\n"
      "        unsafe { std::ptr::write(ptr, v); }\n"
      "    }\n"
      "}\n";
  CHECK(names(scan_one(wrapper)) == std::set<std::string>{"store_at"});

  const std::string caller =
      "fn main() {\n"
      "    let mut b = Buffer::new(16);\n"
      "    let (index, value) = parse_input();\n"
      "    b.store_at(index, value);\n"
      "}\n";
  CHECK(names(scan_one(caller)).empty());
}

TEST_CASE("comments and lookalike identifiers never mark") {
  CHECK(names(scan_one("fn f(){ /* unsafe */ let unsafety = 1; }")).empty());
  CHECK(names(scan_one("fn f(){ // unsafe { boom }\n let x = 1; }")).empty());
  CHECK(names(scan_one("fn f(){ /* a /* unsafe nested */ b */ let x = 1; }")).empty());
  CHECK(names(scan_one("fn f(){ let not_unsafe = 1; let unsafe_mode = 2; }")).empty());
  CHECK(names(scan_one("fn f(){ let r#unsafe = 1; }")).empty());
}

TEST_CASE("string, raw-string, char and byte literals never mark") {
  CHECK(names(scan_one("fn f(){ let s = \"unsafe { x }\"; }")).empty());
  CHECK(names(scan_one("fn f(){ let s = \"esc \\\" unsafe\"; }")).empty());
  CHECK(names(scan_one("fn f(){ let s = r\"unsafe\"; }")).empty());
  CHECK(names(scan_one("fn f(){ let s = r#\"unsafe \"quoted\"\"#; }")).empty());
  CHECK(names(scan_one("fn f(){ let s = r##\"unsafe \"# deep\"##; }")).empty());
  CHECK(names(scan_one("fn f(){ let b = b\"unsafe\"; }")).empty());
  CHECK(names(scan_one("fn f(){ let b = br#\"unsafe\"#; }")).empty());
  CHECK(names(scan_one("fn f(){ let c = 'u'; let s: &'static str = \"x\"; }")).empty());
  CHECK(names(scan_one("fn f(){ let c = '{'; let d = '}'; }")).empty());
}

TEST_CASE("unsafe fn declaration shapes are marked") {
  CHECK(names(scan_one("unsafe fn raw() { }")) == std::set<std::string>{"raw"});
  CHECK(names(scan_one("pub unsafe fn raw() { }")) == std::set<std::string>{"raw"});
  CHECK(names(scan_one("const unsafe fn raw() { }")) == std::set<std::string>{"raw"});
  CHECK(names(scan_one("pub unsafe extern \"C\" fn ffi() { }")) ==
        std::set<std::string>{"ffi"});
  // Bodyless unsafe fn in an extern block still names the function.
  CHECK(names(scan_one("extern \"C\" { unsafe fn foreign(); }")) ==
        std::set<std::string>{"foreign"});
}

TEST_CASE("unsafe blocks attribute to the innermost enclosing function") {
  const std::string src =
      "fn outer() {\n"
      "    fn inner() { unsafe { tick(); } }\n"
      "    inner();\n"
      "}\n"
      "fn sibling() { if true { while false { unsafe { tock(); } } } }\n"
      "fn clean() { let x = 1; }\n";
  CHECK(names(scan_one(src)) == std::set<std::string>{"inner", "sibling"});
}

TEST_CASE("unsafe impl and unsafe trait warn and mark nothing") {
  ScanResult r = scan_one("struct S;\nunsafe impl Send for S {}\nunsafe trait Sneaky {}\n");
  CHECK(r.manifest.functions.empty());
  REQUIRE(r.warnings.size() == 2);
  CHECK(r.warnings[0].find("unsafe impl") != std::string::npos);
  CHECK(r.warnings[1].find("unsafe trait") != std::string::npos);
  CHECK(r.warnings[0].find("lib.rs:2") != std::string::npos);
}

TEST_CASE("unsafe outside any function records a synthetic per-file symbol") {
  ScanResult r = scan_one("static X: i32 = unsafe { seed() };\n", "boot.rs");
  CHECK(names(r) == std::set<std::string>{"<toplevel:boot.rs>"});
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("boot.rs:1") != std::string::npos);
}

TEST_CASE("unsafe fn pointer types mark the function containing the token") {
  // `let f: unsafe fn(u8)` carries the keyword inside holder's body; the
  // lexical contract marks any function whose body contains the token.
  CHECK(names(scan_one("fn holder() { let f: unsafe fn(u8) = other; f(1); }")) ==
        std::set<std::string>{"holder"});
  // A plain fn-pointer type, by contrast, marks nothing.
  CHECK(names(scan_one("type Handler = fn(&mut u8);\nfn ok() { let h: Handler = x; }"))
            .empty());
}

TEST_CASE("scan errors name the file") {
  CHECK_THROWS_AS(scan_one("fn f() { "), uf::ScanError);
  CHECK_THROWS_AS(scan_one("fn f() { } }"), uf::ScanError);
  CHECK_THROWS_AS(scan_one("fn f() { let s = \"open; }"), uf::ScanError);
  CHECK_THROWS_AS(scan_one("fn f() { let s = r#\"open\"; }"), uf::ScanError);
  CHECK_THROWS_AS(scan_one("fn f() { /* open "), uf::ScanError);
  try {
    scan_one("fn f() {", "broken.rs");
    FAIL("expected ScanError");
  } catch (const uf::ScanError& e) {
    CHECK(std::string(e.what()).find("broken.rs") != std::string::npos);
  }
}

TEST_CASE("multi-file scans union their manifests") {
  ScanResult r = uf::scan_source({
      SourceFile{"a.rs", "unsafe fn shared() {}\n"},
      SourceFile{"b.rs", "unsafe fn shared() {}\nfn extra() { unsafe { x(); } }\n"},
  });
  CHECK(names(r) == std::set<std::string>{"shared", "extra"});
}

TEST_CASE("adding an unsafe function grows the manifest by exactly that name") {
  const std::string base =
      "fn a() { let x = 1; }\nunsafe fn b() {}\nfn c() { unsafe { p(); } }\n";
  std::set<std::string> before = names(scan_one(base));
  std::set<std::string> after =
      names(scan_one(base + "fn fresh() { unsafe { q(); } }\n"));
  std::set<std::string> grown;
  for (const auto& s : after)
    if (!before.count(s)) grown.insert(s);
  CHECK(grown == std::set<std::string>{"fresh"});
  for (const auto& s : before) CHECK(after.count(s) == 1);
}

TEST_CASE("injecting unsafe into comments and strings never changes the result") {
  const std::vector<std::string> decoys = {
      "    // unsafe fn ghost() { *p }\n",
      "    /* unsafe { boom } */\n",
      "    let d1 = \"unsafe\";\n",
      "    let d2 = r#\"unsafe fn\"#;\n",
      "    let d3 = b\"unsafe\";\n",
  };
  uf::Rng rng(20260814);
  for (int round = 0; round < 50; ++round) {
    // Base file with one marked and one clean function, split into lines.
    std::vector<std::string> lines = {
        "fn victim(v: &mut Vec<u8>) {\n",
        "    let p = v.as_mut_ptr();\n",
        "    unsafe { *p = 1; }\n",
        "}\n",
        "fn bystander(v: &Vec<u8>) -> usize {\n",
        "    let mut n = v.len();\n",
        "    n += 1;\n",
        "    n\n",
        "}\n",
    };
    std::string base;
    for (const auto& l : lines) base += l;
    std::set<std::string> expected = names(scan_one(base));
    REQUIRE(expected == std::set<std::string>{"victim"});

    // Inject 1-4 decoys at statement positions inside either body.
    const std::vector<size_t> slots = {1, 2, 5, 6, 7};  // after a body line
    std::vector<std::string> mutated = lines;
    size_t injections = 1 + rng.below(4);
    for (size_t k = 0; k < injections; ++k) {
      size_t slot = slots[rng.below(slots.size())];
      mutated.insert(mutated.begin() + static_cast<long>(slot),
                     decoys[rng.below(decoys.size())]);
    }
    std::string text;
    for (const auto& l : mutated) text += l;
    CAPTURE(text);
    CHECK(names(scan_one(text)) == expected);
  }
}

TEST_CASE("generated sources with known ground truth scan exactly") {
  uf::Rng rng(424242);
  for (unsigned i = 0; i < 30; ++i) {
    testsupport::GeneratedRustFile gen = testsupport::generate_rust_file(rng, i);
    ScanResult r = uf::scan_source({gen.file});
    CAPTURE(gen.file.text);
    CHECK(r.manifest.functions == gen.expected);
  }
}
