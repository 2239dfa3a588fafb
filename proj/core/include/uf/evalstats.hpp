#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "uf/fuzzer.hpp"

namespace uf {

struct MwuResult {
  double u = 0.0;        // U statistic of the first sample, midranks for ties
  double p_value = 1.0;  // two-sided
  bool exact = false;    // permutation enumeration rather than normal approx
};

// Exact permutation p (all C(m+n, m) splits of the pooled values, ties
// handled by midranks) when |x|*|y| <= 64; otherwise normal approximation
// with tie correction and continuity correction.
MwuResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y);

// Probability of superiority: (#{x_i > y_j} + 0.5 * #{x_i = y_j}) / (mn).
double a12(const std::vector<double>& x, const std::vector<double>& y);

enum class EffectClass { None, Small, Medium, Large };
std::string_view effect_class_name(EffectClass c);

// None when p >= 0.05; otherwise classed by d = |a12 - 0.5| with thresholds
// 0.06 / 0.14 / 0.21 (the 0.56 / 0.64 / 0.71 recommendations re-centered).
EffectClass classify_effect(double a12_value, double p_value);

enum class Censoring {
  AtDuration,  // a trial that never hit contributes the trial duration
  TiedMax,     // censored trials tie with each other strictly above all hits
};

enum class Winner { None, Baseline, Tool };
std::string_view winner_name(Winner w);

struct OracleStats {
  double p_value = 1.0;
  // a12(full-arm times, partial-arm times): lower time is better, so values
  // near 1 mean the filtered arm wins.
  double a12_tool = 0.5;
  EffectClass effect = EffectClass::None;
  Winner winner = Winner::None;
  size_t full_hits = 0;  // trials in which the oracle was actually reached
  size_t partial_hits = 0;
};

struct StatReport {
  std::map<std::string, OracleStats> per_oracle;
  size_t oracle_count = 0;
  size_t significant_tool = 0;      // p < 0.05 and the filtered arm faster
  size_t significant_baseline = 0;  // p < 0.05 and the full arm faster
  size_t small_count = 0;
  size_t medium_count = 0;
  size_t large_count = 0;
  // Mean a12 over oracles with p < 0.05; 0.0 (rendered "0.00") when none.
  double avg_a12_significant = 0.0;
  uint64_t total_hits_full = 0;
  uint64_t total_hits_partial = 0;
};

// Per-oracle first-hit samples, one value per trial, censored entries
// resolved per `censoring`. Every result must declare the same oracle set.
std::map<std::string, std::vector<double>> collect_samples(
    const std::vector<TrialResult>& results, Censoring censoring);

StatReport aggregate_report(const std::vector<TrialResult>& full,
                            const std::vector<TrialResult>& partial,
                            Censoring censoring = Censoring::AtDuration);

std::string report_to_json(const StatReport& r);
std::string report_to_table(const StatReport& r);

}  // namespace uf
