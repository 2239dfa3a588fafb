#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uf/coverage.hpp"
#include "uf/harness.hpp"
#include "uf/pathfinder.hpp"
#include "uf/rng.hpp"

namespace uf {

inline constexpr uint32_t kHavocStackMax = 8;
inline constexpr uint32_t kEnergyBase = 64;

struct Seed {
  std::vector<uint8_t> bytes;
  uint64_t discovered_at = 0;  // ms since trial start
  size_t novelty_guards = 0;   // guards whose bucket set grew at admission
};

enum class ClockMode {
  Virtual,    // one execution advances the clock by one millisecond
  WallClock,  // real elapsed time; not reproducible
};

struct TrialConfig {
  std::string target;
  uint64_t rng_seed = 0;
  uint64_t duration_ms = 0;
  // Disengaged: the build that has no notion of a block list at all.
  // Engaged (possibly with an empty set): the filtering code path.
  std::optional<BlockList> blocklist;
  // Empty means "use the target's default corpus".
  std::vector<std::vector<uint8_t>> initial_corpus;
  uint32_t havoc_stack_max = kHavocStackMax;
  uint32_t energy_base = kEnergyBase;
  uint32_t map_size = kDefaultMapSize;
  ClockMode clock = ClockMode::Virtual;
  std::string arm_label = "solo";
  uint32_t trial_index = 0;
};

struct TrialResult {
  std::string target;
  std::string arm;
  uint32_t trial_index = 0;
  uint64_t rng_seed = 0;
  uint64_t executions = 0;
  // Milliseconds to first hit per oracle; disengaged = never hit (censored).
  std::map<std::string, std::optional<uint64_t>, std::less<>> first_hit;
  size_t corpus_size = 0;
  size_t crashes = 0;  // distinct crashing trace signatures
  uint64_t duration_ms = 0;  // trial length, kept for downstream censoring
};

// One havoc pass: a stack of 1..havoc_stack_max operators drawn from
// {MSB-first bit flip, random byte set, byte add/sub in [-35,35],
// interesting-value overwrite (0,1,127,128,255 and two-byte 65535),
// block duplicate, block delete (never below one byte), splice with a
// random corpus seed}. Pure function of (input, rng state, corpus).
std::vector<uint8_t> mutate(const std::vector<uint8_t>& input, Rng& rng,
                            const std::vector<Seed>& corpus,
                            uint32_t havoc_stack_max = kHavocStackMax,
                            size_t max_len = kMaxInputLen);

// Round-robin queue over admission order, energy_base mutations per slot,
// admission iff the run grew some guard's bucket set. Deterministic in
// virtual-clock mode: the result is a pure function of the config.
TrialResult run_trial(const TrialConfig& cfg);

struct CampaignConfig {
  std::string target;
  uint32_t trials = 0;  // >= 2
  uint64_t duration_ms = 0;
  uint64_t rng_seed = 0;  // master seed; per-trial seeds derived from it
  uint32_t jobs = 1;
  // A/A sanity mode: the partial arm also fuzzes unfiltered, so both arms
  // must coincide trial for trial.
  bool ab_identical = false;
  uint32_t map_size = kDefaultMapSize;
};

struct CampaignResult {
  std::vector<TrialResult> full;     // baseline arm: everything instrumented
  std::vector<TrialResult> partial;  // tool arm: block-list-filtered feedback
  BlockList blocklist;               // the list the partial arm used
  PathfinderStats pathfinder_stats;
};

// Paired A/B run: trial i uses the same derived rng seed in both arms.
// Trials may run on up to cfg.jobs threads; results land by index, so the
// outcome is independent of scheduling.
CampaignResult run_campaign(const CampaignConfig& cfg);

// Derived per-trial seed stream; exposed so tests can pin expectations.
std::vector<uint64_t> derive_trial_seeds(uint64_t master_seed, uint32_t trials);

// JSON with exactly these keys, in order: target, arm, trial_index,
// rng_seed, executions, first_hit (oracle -> ms or null), corpus_size,
// crashes. Serialized with two-space indent and a trailing newline.
std::string trial_result_to_json(const TrialResult& r);

}  // namespace uf
