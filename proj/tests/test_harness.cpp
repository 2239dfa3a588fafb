#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <string>
#include <vector>

#include "uf/errors.hpp"
#include "uf/harness.hpp"
#include "uf/pathfinder.hpp"
#include "uf/rng.hpp"
#include "uf/unsafescan.hpp"

using uf::ExecutionTrace;
using uf::TargetProgram;

namespace {

std::vector<uint8_t> bytes(std::string_view s) {
  return std::vector<uint8_t>(s.begin(), s.end());
}

std::set<std::string> hit_set(const ExecutionTrace& t) {
  return std::set<std::string>(t.oracle_hits.begin(), t.oracle_hits.end());
}

std::vector<uint8_t> random_input(uf::Rng& rng) {
  std::vector<uint8_t> input(rng.below(48));
  for (auto& b : input) b = rng.byte();
  if (!input.empty() && rng.one_in(3)) input[0] = "KUR"[rng.below(3)];  // bias to gates
  return input;
}

bool traces_equal(const ExecutionTrace& a, const ExecutionTrace& b) {
  return a.events == b.events && a.oracle_hits == b.oracle_hits && a.crashed == b.crashed;
}

}  // namespace

TEST_CASE("bundled target listing and lookup") {
  const auto& targets = uf::list_targets();
  REQUIRE(targets.size() == 3);
  CHECK(targets[0].name == "gatekeeper");
  CHECK(targets[1].name == "honeypot");
  CHECK(targets[2].name == "multi_oracle");
  CHECK(uf::find_target("honeypot").name == "honeypot");
  CHECK_THROWS_AS(uf::find_target("nonexistent"), uf::ConfigError);
}

TEST_CASE("every bundled target is internally consistent") {
  for (const TargetProgram& t : uf::list_targets()) {
    CAPTURE(t.name);
    REQUIRE(t.step != nullptr);
    CHECK_FALSE(t.description.empty());
    CHECK(t.max_input_len == uf::kMaxInputLen);
    CHECK_FALSE(t.default_corpus.empty());
    for (const auto& seed : t.default_corpus) CHECK(seed.size() <= t.max_input_len);

    // The call graph names exactly the declared functions.
    std::set<std::string> declared;
    for (const auto& [f, edges] : t.functions) {
      declared.insert(f);
      CHECK(edges > 0);
    }
    CHECK(t.callgraph.nodes == declared);
    for (const auto& [a, b] : t.callgraph.edges) {
      CHECK(declared.count(a) == 1);
      CHECK(declared.count(b) == 1);
    }

    // Manifest functions exist; every oracle sits in a manifest function.
    for (const auto& f : t.unsafe_manifest.functions) CHECK(declared.count(f) == 1);
    CHECK_FALSE(t.oracles.empty());
    for (const auto& o : t.oracles) CHECK(t.unsafe_manifest.functions.count(o.function) == 1);
  }
}

TEST_CASE("scanning the bundled sources reproduces each manifest") {
  for (const TargetProgram& t : uf::list_targets()) {
    CAPTURE(t.name);
    REQUIRE_FALSE(t.sources.empty());
    uf::ScanResult scan = uf::scan_source(t.sources);
    CHECK(scan.manifest == t.unsafe_manifest);
  }
}

TEST_CASE("execute is deterministic and stays within declared edges") {
  uf::Rng rng(20260814);
  for (const TargetProgram& t : uf::list_targets()) {
    CAPTURE(t.name);
    std::set<std::string> oracle_ids;
    for (const auto& o : t.oracles) oracle_ids.insert(o.id);

    for (int i = 0; i < 500; ++i) {
      std::vector<uint8_t> input = random_input(rng);
      ExecutionTrace a = t.execute(input);
      ExecutionTrace b = t.execute(input);
      CHECK(traces_equal(a, b));

      for (const auto& ev : a.events) {
        auto it = t.functions.find(std::string(ev.function));
        REQUIRE(it != t.functions.end());
        CHECK(ev.edge_index < it->second);
      }
      std::set<std::string> seen;
      for (const auto& id : a.oracle_hits) {
        CHECK(oracle_ids.count(std::string(id)) == 1);
        CHECK(seen.insert(std::string(id)).second);  // at most once per trace
      }
    }
  }
}

TEST_CASE("execute_into matches execute and reuses the buffer") {
  const TargetProgram& t = uf::find_target("gatekeeper");
  ExecutionTrace reused;
  std::vector<uint8_t> first = bytes("RUST!!!!");
  std::vector<uint8_t> second = bytes("x");
  t.execute_into(first.data(), first.size(), reused);
  CHECK(traces_equal(reused, t.execute(first)));
  t.execute_into(second.data(), second.size(), reused);
  CHECK(traces_equal(reused, t.execute(second)));  // cleared, not appended
}

TEST_CASE("over-length inputs are rejected, not crashed") {
  for (const TargetProgram& t : uf::list_targets()) {
    CAPTURE(t.name);
    std::vector<uint8_t> max_ok(t.max_input_len, 'x');
    CHECK_NOTHROW(t.execute(max_ok));
    std::vector<uint8_t> too_long(t.max_input_len + 1, 'x');
    CHECK_THROWS_AS(t.execute(too_long), uf::InputTooLongError);
  }
}

TEST_CASE("gatekeeper: magic plus checksum reaches the vault oracle") {
  const TargetProgram& t = uf::find_target("gatekeeper");

  ExecutionTrace empty = t.execute({});
  CHECK(empty.oracle_hits.empty());
  CHECK_FALSE(empty.events.empty());

  // "RUST" + payload body + trailing mod-256 sum of the body.
  std::vector<uint8_t> valid = bytes("RUST");
  valid.push_back('A');
  valid.push_back('B');
  valid.push_back(static_cast<uint8_t>('A' + 'B'));
  CHECK(hit_set(t.execute(valid)) == std::set<std::string>{"deep_unsafe"});
  CHECK_FALSE(t.execute(valid).crashed);

  // Minimal record: empty body, checksum byte zero.
  std::vector<uint8_t> minimal = bytes("RUST");
  minimal.push_back(0);
  CHECK(hit_set(t.execute(minimal)) == std::set<std::string>{"deep_unsafe"});

  // Wrong magic or wrong checksum stays on the reject path.
  CHECK(t.execute(bytes("RUSH-AB")).oracle_hits.empty());
  std::vector<uint8_t> bad_sum = bytes("RUST");
  bad_sum.push_back('A');
  bad_sum.push_back(0x00);
  CHECK(t.execute(bad_sum).oracle_hits.empty());

  // Crash condition: long valid record whose body starts with 0xFF.
  std::vector<uint8_t> crash = bytes("RUST");
  crash.push_back(0xFF);
  crash.insert(crash.end(), 30, 0x00);
  crash.push_back(0xFF);  // sum of body = 0xFF
  ExecutionTrace boom = t.execute(crash);
  CHECK(boom.crashed);
  CHECK(hit_set(boom) == std::set<std::string>{"deep_unsafe"});
}

TEST_CASE("honeypot: byte gates reveal oracles at increasing depth") {
  const TargetProgram& t = uf::find_target("honeypot");
  CHECK(hit_set(t.execute(bytes("K"))) == std::set<std::string>{"depth_1"});
  CHECK(hit_set(t.execute(bytes("KE"))) == std::set<std::string>{"depth_1", "depth_2"});
  CHECK(hit_set(t.execute(bytes("KEY"))) ==
        std::set<std::string>{"depth_1", "depth_2", "depth_3"});
  CHECK_FALSE(t.execute(bytes("KEY")).crashed);
  CHECK(t.execute(bytes("KEY!")).crashed);
  CHECK(t.execute(bytes("KoYo")).oracle_hits ==
        std::vector<std::string_view>{"depth_1"});

  ExecutionTrace empty = t.execute({});
  CHECK(empty.oracle_hits.empty());
  CHECK_FALSE(empty.events.empty());

  // Ordinary traffic fans out over tally handlers and never finds oracles.
  ExecutionTrace busy = t.execute(bytes("abcdefgh"));
  CHECK(busy.oracle_hits.empty());
  bool saw_handler = false;
  for (const auto& ev : busy.events)
    if (std::string(ev.function).rfind("hp_handle_", 0) == 0) saw_handler = true;
  CHECK(saw_handler);
}

TEST_CASE("honeypot: most functions cannot reach unsafe code") {
  const TargetProgram& t = uf::find_target("honeypot");
  uf::PathfinderResult std_mode = uf::compute_blocklist(t.callgraph, t.unsafe_manifest);
  CHECK(std_mode.stats.blocked_fraction >= 0.80);
  // The dispatcher calls through a handler table; conservative mode unblocks
  // only that one function.
  uf::PathfinderResult con_mode = uf::compute_blocklist(
      t.callgraph, t.unsafe_manifest, uf::BlocklistMode::ConservativeIndirect);
  CHECK(con_mode.stats.blocked == std_mode.stats.blocked - 1);
  CHECK(con_mode.stats.blocked_fraction >= 0.80);
}

TEST_CASE("multi_oracle: seven oracles unlock one pattern byte at a time") {
  const TargetProgram& t = uf::find_target("multi_oracle");
  REQUIRE(t.oracles.size() == 7);

  CHECK(hit_set(t.execute(bytes("U"))) == std::set<std::string>{"loc_1"});
  CHECK(hit_set(t.execute(bytes("UN"))) == std::set<std::string>{"loc_1", "loc_2"});
  CHECK(hit_set(t.execute(bytes("UNSAFE!"))) ==
        std::set<std::string>{"loc_1", "loc_2", "loc_3", "loc_4", "loc_5", "loc_6",
                              "loc_7"});
  CHECK_FALSE(t.execute(bytes("UNSAFE!")).crashed);

  std::vector<uint8_t> crash = bytes("UNSAFE!");
  crash.push_back(0xFF);
  CHECK(t.execute(crash).crashed);

  CHECK(t.execute(bytes("nope")).oracle_hits.empty());
  CHECK(t.execute(bytes("UX")).oracle_hits ==
        std::vector<std::string_view>{"loc_1"});
}

TEST_CASE("oracle-hitting traces avoid every blocked function") {
  uf::Rng rng(777);
  for (const TargetProgram& t : uf::list_targets()) {
    CAPTURE(t.name);
    uf::BlockList blocked =
        uf::compute_blocklist(t.callgraph, t.unsafe_manifest).blocklist;
    for (int i = 0; i < 500; ++i) {
      std::vector<uint8_t> input = random_input(rng);
      ExecutionTrace trace = t.execute(input);
      if (trace.oracle_hits.empty()) continue;
      for (const auto& ev : trace.events)
        CHECK_FALSE(blocked.contains(std::string(ev.function)));
    }
  }
}
