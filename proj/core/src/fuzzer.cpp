#include "uf/fuzzer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"
#include "uf/errors.hpp"

namespace uf {

namespace {

enum Op : uint64_t {
  kBitFlip,
  kByteSet,
  kAddSub,
  kInteresting,
  kDupBlock,
  kDelBlock,
  kSplice,
  kOpCount,
};

using diff_t = std::vector<uint8_t>::difference_type;

}  // namespace

std::vector<uint8_t> mutate(const std::vector<uint8_t>& input, Rng& rng,
                            const std::vector<Seed>& corpus, uint32_t havoc_stack_max,
                            size_t max_len) {
  std::vector<uint8_t> out = input;
  const uint64_t stack = 1 + rng.below(havoc_stack_max);
  for (uint64_t s = 0; s < stack; ++s) {
    switch (rng.below(kOpCount)) {
      case kBitFlip: {
        if (out.empty()) break;
        uint64_t bit = rng.below(out.size() * 8);
        out[bit / 8] ^= static_cast<uint8_t>(0x80u >> (bit % 8));
        break;
      }
      case kByteSet: {
        if (out.empty()) break;
        uint64_t pos = rng.below(out.size());
        out[pos] = rng.byte();
        break;
      }
      case kAddSub: {
        if (out.empty()) break;
        uint64_t pos = rng.below(out.size());
        uint8_t delta = static_cast<uint8_t>(1 + rng.below(35));
        bool add = rng.one_in(2);
        out[pos] = static_cast<uint8_t>(add ? out[pos] + delta : out[pos] - delta);
        break;
      }
      case kInteresting: {
        if (out.empty()) break;
        static constexpr uint8_t kOneByte[5] = {0x00, 0x01, 0x7f, 0x80, 0xff};
        uint64_t pick = rng.below(6);
        if (pick < 5) {
          out[rng.below(out.size())] = kOneByte[pick];
        } else if (out.size() >= 2) {
          uint64_t pos = rng.below(out.size() - 1);
          out[pos] = 0xff;  // 65535 takes both bytes
          out[pos + 1] = 0xff;
        } else {
          out[0] = 0xff;
        }
        break;
      }
      case kDupBlock: {
        if (out.empty()) break;
        uint64_t len = 1 + rng.below(std::min<uint64_t>(out.size(), 32));
        uint64_t src = rng.below(out.size() - len + 1);
        uint64_t dst = rng.below(out.size() + 1);
        if (out.size() + len > max_len) break;  // draws stay consumed
        std::vector<uint8_t> block(out.begin() + static_cast<diff_t>(src),
                                   out.begin() + static_cast<diff_t>(src + len));
        out.insert(out.begin() + static_cast<diff_t>(dst), block.begin(), block.end());
        break;
      }
      case kDelBlock: {
        if (out.size() <= 1) break;  // never shrink below one byte
        uint64_t len = 1 + rng.below(std::min<uint64_t>(out.size() - 1, 32));
        uint64_t pos = rng.below(out.size() - len + 1);
        out.erase(out.begin() + static_cast<diff_t>(pos),
                  out.begin() + static_cast<diff_t>(pos + len));
        break;
      }
      case kSplice: {
        if (out.empty() || corpus.empty()) break;
        const std::vector<uint8_t>& other = corpus[rng.below(corpus.size())].bytes;
        uint64_t keep = 1 + rng.below(out.size());  // prefix stays non-empty
        uint64_t from = other.empty() ? 0 : rng.below(other.size() + 1);
        out.resize(keep);
        for (uint64_t i = from; i < other.size() && out.size() < max_len; ++i)
          out.push_back(other[i]);
        break;
      }
    }
  }
  return out;
}

namespace {

uint64_t trace_signature(const ExecutionTrace& trace) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, size_t n) {
    const uint8_t* b = static_cast<const uint8_t*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  for (const TraceEvent& ev : trace.events) {
    mix(ev.function.data(), ev.function.size());
    uint8_t sep = 0;
    mix(&sep, 1);
    uint32_t edge = ev.edge_index;
    mix(&edge, sizeof edge);
  }
  return h;
}

}  // namespace

TrialResult run_trial(const TrialConfig& cfg) {
  const TargetProgram& target = find_target(cfg.target);
  // duration 0 is the degenerate zero-budget trial: configuration is still
  // validated, but nothing executes and every oracle stays unhit.
  const std::vector<std::vector<uint8_t>>& initial =
      cfg.initial_corpus.empty() ? target.default_corpus : cfg.initial_corpus;
  if (initial.empty()) throw ConfigError("initial corpus is empty");
  for (const auto& input : initial)
    if (input.size() > target.max_input_len)
      throw InputTooLongError("corpus input of " + std::to_string(input.size()) +
                              " bytes exceeds limit of " +
                              std::to_string(target.max_input_len));
  if (cfg.blocklist) {
    for (const auto& f : cfg.blocklist->functions)
      if (!target.functions.count(f))
        throw ConfigError("block list symbol not in target " + cfg.target + ": " + f);
  }

  GuardTable table = cfg.blocklist
                         ? allocate_guards(target.functions, *cfg.blocklist, cfg.map_size)
                         : allocate_guards(target.functions, cfg.map_size);
  if (table.assignment.empty())
    throw ConfigError("block list excludes every function of target " + cfg.target);

  TrialResult result;
  result.target = cfg.target;
  result.arm = cfg.arm_label;
  result.trial_index = cfg.trial_index;
  result.rng_seed = cfg.rng_seed;
  result.duration_ms = cfg.duration_ms;
  for (const OracleSite& o : target.oracles) result.first_hit[o.id];

  CoverageMap map(cfg.map_size);
  BucketSummary summary(cfg.map_size);
  Rng rng(cfg.rng_seed);
  std::vector<Seed> queue;
  std::set<uint64_t> crash_signatures;
  ExecutionTrace trace;
  std::vector<uint32_t> touched;

  const auto wall_start = std::chrono::steady_clock::now();
  uint64_t now_ms = 0;
  auto advance_clock = [&] {
    if (cfg.clock == ClockMode::Virtual) {
      now_ms = result.executions;  // one execution is one millisecond
    } else {
      now_ms = static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                         std::chrono::steady_clock::now() - wall_start)
                                         .count());
    }
  };

  auto run_one = [&](const std::vector<uint8_t>& input) {
    target.execute_into(input.data(), input.size(), trace);
    ++result.executions;
    advance_clock();
    touched.clear();
    apply_trace(map, table, trace, &touched);
    NoveltyResult nov = novelty_check(summary, map, touched);
    for (std::string_view oracle : trace.oracle_hits) {
      auto it = result.first_hit.find(oracle);
      if (it == result.first_hit.end())
        throw ConfigError("target emitted undeclared oracle: " + std::string(oracle));
      if (!it->second) it->second = now_ms;
    }
    if (trace.crashed) crash_signatures.insert(trace_signature(trace));
    map.reset_slots(touched);
    if (nov.is_novel) queue.push_back({input, now_ms, nov.grown_guards});
  };

  for (const auto& input : initial) {
    if (now_ms >= cfg.duration_ms) break;
    run_one(input);
  }
  if (queue.empty() && now_ms < cfg.duration_ms) {
    // Filtering may reject every starter input; keep one unadmitted entry so
    // the loop has something to mutate.
    queue.push_back({initial.front(), now_ms, 0});
  }

  size_t cursor = 0;
  while (now_ms < cfg.duration_ms) {
    const std::vector<uint8_t> parent = queue[cursor % queue.size()].bytes;
    ++cursor;
    for (uint32_t e = 0; e < cfg.energy_base && now_ms < cfg.duration_ms; ++e) {
      std::vector<uint8_t> mutant =
          mutate(parent, rng, queue, cfg.havoc_stack_max, target.max_input_len);
      run_one(mutant);
    }
  }

  result.corpus_size = queue.size();
  result.crashes = crash_signatures.size();
  return result;
}

std::vector<uint64_t> derive_trial_seeds(uint64_t master_seed, uint32_t trials) {
  std::vector<uint64_t> seeds(trials);
  uint64_t state = master_seed;
  for (auto& s : seeds) s = splitmix64(state);
  return seeds;
}

CampaignResult run_campaign(const CampaignConfig& cfg) {
  if (cfg.trials < 2) throw ConfigError("campaign needs at least 2 trials");
  const TargetProgram& target = find_target(cfg.target);

  CampaignResult result;
  PathfinderResult pf = compute_blocklist(target.callgraph, target.unsafe_manifest);
  result.pathfinder_stats = pf.stats;
  if (!cfg.ab_identical) result.blocklist = pf.blocklist;

  const std::vector<uint64_t> seeds = derive_trial_seeds(cfg.rng_seed, cfg.trials);

  std::vector<TrialConfig> jobs;
  jobs.reserve(2 * cfg.trials);
  for (uint32_t i = 0; i < cfg.trials; ++i) {
    TrialConfig trial;
    trial.target = cfg.target;
    trial.rng_seed = seeds[i];
    trial.duration_ms = cfg.duration_ms;
    trial.map_size = cfg.map_size;
    trial.trial_index = i;
    trial.blocklist = BlockList{};
    trial.arm_label = "full";
    jobs.push_back(trial);
    trial.blocklist = result.blocklist;
    trial.arm_label = "partial";
    jobs.push_back(trial);
  }

  std::vector<TrialResult> outcomes(jobs.size());
  const uint32_t workers =
      std::min<uint32_t>(std::max(1u, cfg.jobs), static_cast<uint32_t>(jobs.size()));
  if (workers == 1) {
    for (size_t k = 0; k < jobs.size(); ++k) outcomes[k] = run_trial(jobs[k]);
  } else {
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      for (;;) {
        size_t k = next.fetch_add(1);
        if (k >= jobs.size()) return;
        try {
          outcomes[k] = run_trial(jobs[k]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (uint32_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  result.full.reserve(cfg.trials);
  result.partial.reserve(cfg.trials);
  for (size_t k = 0; k < outcomes.size(); ++k) {
    if (outcomes[k].arm == "full")
      result.full.push_back(std::move(outcomes[k]));
    else
      result.partial.push_back(std::move(outcomes[k]));
  }
  return result;
}

std::string trial_result_to_json(const TrialResult& r) {
  nlohmann::ordered_json j;
  j["target"] = r.target;
  j["arm"] = r.arm;
  j["trial_index"] = r.trial_index;
  j["rng_seed"] = r.rng_seed;
  j["executions"] = r.executions;
  nlohmann::ordered_json hits = nlohmann::ordered_json::object();
  for (const auto& [oracle, ms] : r.first_hit) {
    if (ms)
      hits[oracle] = *ms;
    else
      hits[oracle] = nullptr;
  }
  j["first_hit"] = std::move(hits);
  j["corpus_size"] = r.corpus_size;
  j["crashes"] = r.crashes;
  return j.dump(2) + "\n";
}

}  // namespace uf
