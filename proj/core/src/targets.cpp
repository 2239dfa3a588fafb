#include "targets.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <utility>

namespace uf {

namespace {

std::vector<uint8_t> bytes(std::string_view s) {
  return std::vector<uint8_t>(s.begin(), s.end());
}

CallGraph make_graph(const std::map<FunctionId, uint32_t>& functions,
                     const std::vector<std::pair<std::string, std::string>>& edges,
                     const std::vector<std::string>& indirect_sites = {}) {
  CallGraph g;
  for (const auto& [f, _] : functions) g.nodes.insert(f);
  for (const auto& [a, b] : edges) g.edges.emplace(a, b);
  for (const auto& f : indirect_sites) g.indirect_sites.insert(f);
  return g;
}

void emit(ExecutionTrace& t, std::string_view function, uint32_t edge) {
  t.events.push_back({function, edge});
}

// ---------------------------------------------------------------------------
// gatekeeper: wire format "RUST" + payload whose last byte is the mod-256 sum
// of the preceding payload bytes. Valid records reach a vault write performing
// raw pointer stores; everything else lands in safe reject bookkeeping.

namespace gk {

constexpr std::string_view kMain = "gk_main";
constexpr std::string_view kValidate = "gk_validate";
constexpr std::string_view kParse = "gk_parse";
constexpr std::string_view kChecksum = "gk_checksum";
constexpr std::string_view kVault = "gk_vault";
constexpr std::string_view kCommit = "gk_commit";
constexpr std::string_view kNoteInvalid = "gk_note_invalid";
constexpr std::string_view kCountStats = "gk_count_stats";
constexpr std::string_view kMagic = "RUST";
constexpr std::string_view kOracle = "deep_unsafe";

void note_invalid(uint32_t reason, size_t len, ExecutionTrace& t) {
  emit(t, kNoteInvalid, 0);
  emit(t, kNoteInvalid, 1 + reason);  // 1..4: empty, short, magic, checksum
  emit(t, kCountStats, 0);
  emit(t, kCountStats, len % 2 ? 1 : 2);
}

void commit(const uint8_t* payload, size_t n, ExecutionTrace& t) {
  emit(t, kCommit, 0);
  if (payload[n - 1] % 2 == 0) emit(t, kCommit, 1);
}

void vault(const uint8_t* payload, size_t n, ExecutionTrace& t) {
  emit(t, kVault, 0);
  t.oracle_hits.push_back(kOracle);
  if (n >= 32 && payload[0] == 0xFF) {
    emit(t, kVault, 1);
    t.crashed = true;
  } else {
    emit(t, kVault, 2);
  }
  commit(payload, n, t);
}

void checksum(const uint8_t* payload, size_t n, ExecutionTrace& t) {
  emit(t, kChecksum, 0);
  uint32_t sum = 0;
  for (size_t i = 0; i + 1 < n; ++i) sum += payload[i];
  if ((sum & 0xFF) == payload[n - 1]) {
    emit(t, kChecksum, 1);
    vault(payload, n, t);
  } else {
    emit(t, kChecksum, 2);
    note_invalid(3, n, t);
  }
}

void parse(const uint8_t* d, size_t n, ExecutionTrace& t) {
  uint32_t matched = 0;
  while (matched < 4 && d[matched] == static_cast<uint8_t>(kMagic[matched])) ++matched;
  emit(t, kParse, matched);  // edges 0..4: how much of the magic matched
  if (matched < 4) {
    emit(t, kParse, 5);
    note_invalid(2, n, t);
  } else {
    checksum(d + 4, n - 4, t);
  }
}

void validate(const uint8_t* d, size_t n, ExecutionTrace& t) {
  emit(t, kValidate, 0);
  if (n < 5) {  // magic plus at least one payload byte
    emit(t, kValidate, 1);
    note_invalid(1, n, t);
  } else {
    emit(t, kValidate, 2);
    parse(d, n, t);
  }
}

void step(const uint8_t* d, size_t n, ExecutionTrace& t) {
  emit(t, kMain, 0);
  if (n == 0) {
    emit(t, kMain, 1);
    note_invalid(0, n, t);
  } else {
    emit(t, kMain, 2);
    validate(d, n, t);
  }
}

constexpr std::string_view kSource = R"##(//! Record vault behind a wire-format gate: 4-byte magic, payload, trailing
//! mod-256 checksum of the payload body.

use std::ptr;

const MAGIC: &[u8; 4] = b"RUST";

pub struct Vault {
    cells: Vec<u8>,
    cursor: usize,
    rejects: u64,
    odd_rejects: u64,
}

unsafe impl Sync for Vault {}

impl Vault {
    pub fn new(capacity: usize) -> Vault {
        Vault { cells: vec![0; capacity], cursor: 0, rejects: 0, odd_rejects: 0 }
    }
}

pub fn gk_main(vault: &mut Vault, input: &[u8]) -> bool {
    if input.is_empty() {
        gk_note_invalid(vault, 0, input.len());
        return false;
    }
    gk_validate(vault, input)
}

fn gk_validate(vault: &mut Vault, input: &[u8]) -> bool {
    if input.len() < MAGIC.len() + 1 {
        gk_note_invalid(vault, 1, input.len());
        return false;
    }
    gk_parse(vault, input)
}

fn gk_parse<'a>(vault: &mut Vault, input: &'a [u8]) -> bool {
    if &input[..MAGIC.len()] != MAGIC {
        gk_note_invalid(vault, 2, input.len());
        return false;
    }
    gk_checksum(vault, &input[MAGIC.len()..])
}

fn gk_checksum(vault: &mut Vault, payload: &[u8]) -> bool {
    let body = &payload[..payload.len() - 1];
    let sum = body.iter().fold(0u8, |acc, b| acc.wrapping_add(*b));
    if sum != payload[payload.len() - 1] {
        gk_note_invalid(vault, 3, payload.len());
        return false;
    }
    gk_vault(vault, body)
}

fn gk_vault(vault: &mut Vault, body: &[u8]) -> bool {
    if vault.cursor + body.len() > vault.cells.len() {
        vault.cursor = 0;
    }
    // Bounds were just re-established; skip the slice checks on the hot path.
    unsafe {
        let base = vault.cells.as_mut_ptr().add(vault.cursor);
        for (i, b) in body.iter().enumerate() {
            ptr::write(base.add(i), *b);
        }
    }
    vault.cursor += body.len();
    gk_commit(vault)
}

fn gk_commit(vault: &mut Vault) -> bool {
    let len = vault.cells.len();
    unsafe {
        let first = ptr::read(vault.cells.as_ptr());
        let last = ptr::read(vault.cells.as_ptr().add(len - 1));
        first <= last || true
    }
}

fn gk_note_invalid(vault: &mut Vault, reason: u32, len: usize) {
    // Reject bookkeeping is plain safe code; the word unsafe in this comment
    // must not fool the scanner.
    let _ = reason;
    gk_count_stats(vault, len);
}

fn gk_count_stats(vault: &mut Vault, len: usize) {
    let tag = "unsafe-free path";
    let _ = tag;
    vault.rejects += 1;
    if len % 2 == 1 {
        vault.odd_rejects += 1;
    }
}
)##";

TargetProgram make() {
  TargetProgram t;
  t.name = "gatekeeper";
  t.description =
      "magic-plus-checksum gate in front of one raw-pointer vault write; "
      "small safe reject path";
  t.functions = {
      {"gk_main", 3},        {"gk_validate", 3}, {"gk_parse", 6},
      {"gk_checksum", 3},    {"gk_vault", 3},    {"gk_commit", 2},
      {"gk_note_invalid", 5}, {"gk_count_stats", 3},
  };
  t.callgraph = make_graph(t.functions, {
      {"gk_main", "gk_validate"},
      {"gk_main", "gk_note_invalid"},
      {"gk_validate", "gk_parse"},
      {"gk_validate", "gk_note_invalid"},
      {"gk_parse", "gk_checksum"},
      {"gk_parse", "gk_note_invalid"},
      {"gk_checksum", "gk_vault"},
      {"gk_checksum", "gk_note_invalid"},
      {"gk_vault", "gk_commit"},
      {"gk_note_invalid", "gk_count_stats"},
  });
  t.unsafe_manifest.functions = {"gk_vault", "gk_commit"};
  t.oracles = {{"deep_unsafe", "gk_vault"}};
  t.sources = {{"gatekeeper.rs", std::string(kSource)}};
  t.default_corpus = {bytes("A"), bytes("hello"), bytes("RUST!!!!")};
  t.step = step;
  return t;
}

}  // namespace gk

// ---------------------------------------------------------------------------
// honeypot: a 32-way dispatch over per-byte tallies generates endless
// coverage novelty but can never reach unsafe code; a narrow 'K','E','Y'
// gate chain guards three unsafe stages with progressively deeper oracles.

namespace hp {

constexpr std::string_view kMain = "hp_main";
constexpr std::string_view kDispatch = "hp_dispatch";
constexpr std::string_view kStage1 = "hp_stage1";
constexpr std::string_view kStage2 = "hp_stage2";
constexpr std::string_view kStage3 = "hp_stage3";
constexpr std::string_view kOracle1 = "depth_1";
constexpr std::string_view kOracle2 = "depth_2";
constexpr std::string_view kOracle3 = "depth_3";
constexpr uint32_t kHandlers = 32;
constexpr size_t kScanCap = 24;

const std::string& handler_name(uint32_t i) {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (uint32_t h = 0; h < kHandlers; ++h) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "hp_handle_%02u", h);
      v.emplace_back(buf);
    }
    return v;
  }();
  return names[i];
}

void stage3(const uint8_t* d, size_t n, ExecutionTrace& t) {
  emit(t, kStage3, 0);
  t.oracle_hits.push_back(kOracle3);
  if (n >= 4 && d[3] == '!') {
    emit(t, kStage3, 1);
    t.crashed = true;
  } else {
    emit(t, kStage3, 2);
  }
}

void stage2(const uint8_t* d, size_t n, ExecutionTrace& t) {
  emit(t, kStage2, 0);
  t.oracle_hits.push_back(kOracle2);
  if (n >= 3 && d[2] == 'Y') {
    emit(t, kStage2, 1);
    stage3(d, n, t);
  } else {
    emit(t, kStage2, 2);
  }
}

void stage1(const uint8_t* d, size_t n, ExecutionTrace& t) {
  emit(t, kStage1, 0);
  t.oracle_hits.push_back(kOracle1);
  if (n >= 2 && d[1] == 'E') {
    emit(t, kStage1, 1);
    stage2(d, n, t);
  } else {
    emit(t, kStage1, 2);
  }
}

void dispatch(const uint8_t* d, size_t n, ExecutionTrace& t) {
  emit(t, kDispatch, 0);
  uint32_t h = d[0] % kHandlers;
  emit(t, kDispatch, 1 + h);
  std::string_view handler = handler_name(h);
  emit(t, handler, 0);
  size_t scan = std::min(n, kScanCap);
  for (size_t i = 1; i < scan; ++i) emit(t, handler, 1u + d[i]);
}

void step(const uint8_t* d, size_t n, ExecutionTrace& t) {
  emit(t, kMain, 0);
  if (n == 0) {
    emit(t, kMain, 3);
    return;
  }
  if (d[0] == 'K') {
    emit(t, kMain, 1);
    stage1(d, n, t);
  } else {
    emit(t, kMain, 2);
    dispatch(d, n, t);
  }
}

std::string make_source() {
  std::string src = R"##(//! Tally service with a maintenance backdoor. Ordinary traffic fans out
//! over 32 per-opcode tally handlers; inputs starting with the key prefix
//! walk a chain of raw buffer stages instead.

pub struct Tally {
    counts: [u64; 256],
    scratch: Vec<u8>,
}

pub fn hp_main(state: &mut Tally, input: &[u8]) {
    match input.first() {
        None => {}
        Some(&b'K') => hp_stage1(state, input),
        Some(_) => hp_dispatch(state, input),
    }
}

fn hp_stage1(state: &mut Tally, input: &[u8]) {
    // First gate passed; stage buffers are raw from here on.
    unsafe {
        let p = state.scratch.as_mut_ptr();
        p.write(input[0]);
    }
    if input.len() >= 2 && input[1] == b'E' {
        hp_stage2(state, input);
    }
}

fn hp_stage2(state: &mut Tally, input: &[u8]) {
    unsafe {
        let p = state.scratch.as_mut_ptr().add(1);
        p.write(input[1]);
    }
    if input.len() >= 3 && input[2] == b'Y' {
        hp_stage3(state, input);
    }
}

fn hp_stage3(state: &mut Tally, input: &[u8]) {
    unsafe {
        let p = state.scratch.as_mut_ptr().add(2);
        p.write(input[2]);
        if input.len() >= 4 && input[3] == b'!' {
            // Deliberate out-of-bounds write: the planted defect.
            let end = state.scratch.as_mut_ptr().add(state.scratch.len());
            end.write(0xff);
        }
    }
}

type Handler = fn(&mut Tally, &[u8]);

fn hp_dispatch(state: &mut Tally, input: &[u8]) {
    const HANDLERS: [Handler; 32] = [
)##";
  for (uint32_t h = 0; h < kHandlers; ++h) {
    src += "        " + handler_name(h) + ",\n";
  }
  src += R"##(    ];
    let opcode = (input[0] % 32) as usize;
    HANDLERS[opcode](state, input);
}
)##";
  for (uint32_t h = 0; h < kHandlers; ++h) {
    src += "\nfn " + handler_name(h) + "(state: &mut Tally, input: &[u8]) {\n";
    src += "    for b in input.iter().skip(1).take(23) {\n";
    src += "        state.counts[*b as usize] += 1;\n";
    src += "    }\n";
    src += "}\n";
  }
  return src;
}

TargetProgram make() {
  TargetProgram t;
  t.name = "honeypot";
  t.description =
      "large safe dispatch subtree with abundant novelty plus a 3-gate "
      "unsafe chain with oracles at increasing depth";
  t.functions = {
      {"hp_main", 4}, {"hp_dispatch", 1 + kHandlers},
      {"hp_stage1", 3}, {"hp_stage2", 3}, {"hp_stage3", 3},
  };
  std::vector<std::pair<std::string, std::string>> edges = {
      {"hp_main", "hp_stage1"},
      {"hp_main", "hp_dispatch"},
      {"hp_stage1", "hp_stage2"},
      {"hp_stage2", "hp_stage3"},
  };
  for (uint32_t h = 0; h < kHandlers; ++h) {
    t.functions.emplace(handler_name(h), 257);  // entry + one edge per byte value
    edges.emplace_back("hp_dispatch", handler_name(h));
  }
  // The dispatch table is an indirect call; the shipped graph resolves it
  // but keeps the site marked, so conservative mode has something to do.
  t.callgraph = make_graph(t.functions, edges, {"hp_dispatch"});
  t.unsafe_manifest.functions = {"hp_stage1", "hp_stage2", "hp_stage3"};
  t.oracles = {{"depth_1", "hp_stage1"}, {"depth_2", "hp_stage2"}, {"depth_3", "hp_stage3"}};
  t.sources = {{"honeypot.rs", make_source()}};
  t.default_corpus = {bytes("KAAAAAAA"), bytes("hello world"),
                      {0x00, 0x10, 0x20, 0x30, 0x40, 0x50, 0x60, 0x70, 0x80, 0x90, 0xa0, 0xb0}};
  t.step = step;
  return t;
}

}  // namespace hp

// ---------------------------------------------------------------------------
// multi_oracle: seven unsafe stages gated on successive bytes of "UNSAFE!",
// one oracle per stage, for exercising per-oracle statistics aggregation.

namespace mo {

constexpr std::string_view kMain = "mo_main";
constexpr std::string_view kFallback = "mo_fallback";
constexpr std::string_view kStats = "mo_stats";
constexpr std::string_view kPattern = "UNSAFE!";
constexpr uint32_t kLevels = 7;

constexpr std::string_view kLevel[kLevels] = {"mo_l1", "mo_l2", "mo_l3", "mo_l4",
                                              "mo_l5", "mo_l6", "mo_l7"};
constexpr std::string_view kOracle[kLevels] = {"loc_1", "loc_2", "loc_3", "loc_4",
                                               "loc_5", "loc_6", "loc_7"};

void level(uint32_t i, const uint8_t* d, size_t n, ExecutionTrace& t) {
  emit(t, kLevel[i], 0);
  t.oracle_hits.push_back(kOracle[i]);
  if (i + 1 < kLevels) {
    if (n >= i + 2 && d[i + 1] == static_cast<uint8_t>(kPattern[i + 1])) {
      emit(t, kLevel[i], 1);
      level(i + 1, d, n, t);
    } else {
      emit(t, kLevel[i], 2);
    }
    return;
  }
  if (n >= 8 && d[7] == 0xFF) {
    emit(t, kLevel[i], 1);
    t.crashed = true;
  } else {
    emit(t, kLevel[i], 2);
  }
}

void step(const uint8_t* d, size_t n, ExecutionTrace& t) {
  emit(t, kMain, 0);
  if (n == 0) {
    emit(t, kMain, 3);
    return;
  }
  if (d[0] == static_cast<uint8_t>(kPattern[0])) {
    emit(t, kMain, 1);
    level(0, d, n, t);
  } else {
    emit(t, kMain, 2);
    emit(t, kFallback, 0);
    emit(t, kFallback, 1 + d[0] % 3);
    emit(t, kStats, 0);
    emit(t, kStats, 1 + static_cast<uint32_t>(std::min<size_t>(n, 8)));
  }
}

constexpr std::string_view kSource = R"##(//! Seven-level decoder where every level needs one more pattern byte and
//! performs one more unchecked access. Used to exercise per-location
//! statistics over many oracles at different depths.

pub struct Decoder {
    lanes: Vec<u32>,
    seen: u64,
    sizes: [u64; 9],
}

pub fn mo_main(dec: &mut Decoder, input: &[u8]) {
    if input.first() == Some(&b'U') {
        mo_l1(dec, input);
    } else {
        mo_fallback(dec, input);
    }
}

fn mo_l1(dec: &mut Decoder, input: &[u8]) {
    let v = unsafe { *dec.lanes.get_unchecked(0) };
    dec.seen = dec.seen.wrapping_add(v as u64);
    if input.len() >= 2 && input[1] == b'N' {
        mo_l2(dec, input);
    }
}

fn mo_l2(dec: &mut Decoder, input: &[u8]) {
    let v = unsafe { *dec.lanes.get_unchecked(1) };
    dec.seen = dec.seen.wrapping_add(v as u64);
    if input.len() >= 3 && input[2] == b'S' {
        mo_l3(dec, input);
    }
}

fn mo_l3(dec: &mut Decoder, input: &[u8]) {
    let v = unsafe { *dec.lanes.get_unchecked(2) };
    dec.seen = dec.seen.wrapping_add(v as u64);
    if input.len() >= 4 && input[3] == b'A' {
        mo_l4(dec, input);
    }
}

fn mo_l4(dec: &mut Decoder, input: &[u8]) {
    let v = unsafe { *dec.lanes.get_unchecked(3) };
    dec.seen = dec.seen.wrapping_add(v as u64);
    if input.len() >= 5 && input[4] == b'F' {
        mo_l5(dec, input);
    }
}

fn mo_l5(dec: &mut Decoder, input: &[u8]) {
    let v = unsafe { *dec.lanes.get_unchecked(4) };
    dec.seen = dec.seen.wrapping_add(v as u64);
    if input.len() >= 6 && input[5] == b'E' {
        mo_l6(dec, input);
    }
}

fn mo_l6(dec: &mut Decoder, input: &[u8]) {
    let v = unsafe { *dec.lanes.get_unchecked(5) };
    dec.seen = dec.seen.wrapping_add(v as u64);
    if input.len() >= 7 && input[6] == b'!' {
        mo_l7(dec, input);
    }
}

fn mo_l7(dec: &mut Decoder, input: &[u8]) {
    unsafe {
        let lane = dec.lanes.as_mut_ptr().add(6);
        lane.write(input.len() as u32);
        if input.len() >= 8 && input[7] == 0xff {
            // Planted defect: one past the last lane.
            let oob = dec.lanes.as_mut_ptr().add(dec.lanes.len());
            oob.write(0);
        }
    }
}

fn mo_fallback(dec: &mut Decoder, input: &[u8]) {
    let mode = r"mode: unsafe-less"; // raw string, not a keyword use
    let _ = mode;
    let lane = (input[0] % 3) as u64;
    dec.seen = dec.seen.wrapping_add(lane);
    mo_stats(dec, input.len());
}

fn mo_stats(dec: &mut Decoder, len: usize) {
    let bucket = if len > 8 { 8 } else { len };
    dec.sizes[bucket] += 1;
    let marker = '!';
    let _ = marker;
}
)##";

TargetProgram make() {
  TargetProgram t;
  t.name = "multi_oracle";
  t.description = "seven chained unsafe stages with one oracle each, for "
                  "aggregation over many locations";
  t.functions = {
      {"mo_main", 4}, {"mo_fallback", 4}, {"mo_stats", 10},
  };
  std::vector<std::pair<std::string, std::string>> edges = {
      {"mo_main", "mo_l1"},
      {"mo_main", "mo_fallback"},
      {"mo_fallback", "mo_stats"},
  };
  for (uint32_t i = 0; i < kLevels; ++i) {
    t.functions.emplace(FunctionId(kLevel[i]), 3);
    if (i + 1 < kLevels) edges.emplace_back(FunctionId(kLevel[i]), FunctionId(kLevel[i + 1]));
  }
  t.callgraph = make_graph(t.functions, edges);
  for (uint32_t i = 0; i < kLevels; ++i) {
    t.unsafe_manifest.functions.insert(FunctionId(kLevel[i]));
    t.oracles.push_back({std::string(kOracle[i]), FunctionId(kLevel[i])});
  }
  t.sources = {{"multi_oracle.rs", std::string(kSource)}};
  t.default_corpus = {bytes("test"), bytes("UN**")};
  t.step = step;
  return t;
}

}  // namespace mo

}  // namespace

std::vector<TargetProgram> make_bundled_targets() {
  std::vector<TargetProgram> targets;
  targets.push_back(gk::make());
  targets.push_back(hp::make());
  targets.push_back(mo::make());
  return targets;
}

}  // namespace uf
