#include "uf/evalstats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "json.hpp"
#include "uf/errors.hpp"

namespace uf {

namespace {

// Midranks of the pooled sequence, in pooled order (x values then y values).
std::vector<double> pooled_midranks(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t total = x.size() + y.size();
  std::vector<size_t> order(total);
  std::iota(order.begin(), order.end(), size_t{0});
  auto value_at = [&](size_t i) { return i < x.size() ? x[i] : y[i - x.size()]; };
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return value_at(a) < value_at(b); });

  std::vector<double> ranks(total);
  size_t i = 0;
  while (i < total) {
    size_t j = i;
    while (j + 1 < total && value_at(order[j + 1]) == value_at(order[i])) ++j;
    double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = midrank;
    i = j + 1;
  }
  return ranks;
}

// Fraction of all C(total, m) index splits whose |U - mn/2| is at least the
// observed deviation. Ranks are half-integers, so sums compare exactly; the
// epsilon only absorbs accumulated noise.
double exact_permutation_p(const std::vector<double>& ranks, size_t m, double observed_dev) {
  const size_t total = ranks.size();
  const double mn = static_cast<double>(m) * static_cast<double>(total - m);
  const double rank_base = static_cast<double>(m) * static_cast<double>(m + 1) / 2.0;

  std::vector<size_t> pick(m);
  std::iota(pick.begin(), pick.end(), size_t{0});
  uint64_t splits = 0;
  uint64_t extreme = 0;
  for (;;) {
    double rank_sum = 0.0;
    for (size_t idx : pick) rank_sum += ranks[idx];
    double u = rank_sum - rank_base;
    ++splits;
    if (std::abs(u - mn / 2.0) >= observed_dev - 1e-9) ++extreme;

    // next combination in lexicographic order
    size_t slot = m;
    while (slot > 0 && pick[slot - 1] == total - m + slot - 1) --slot;
    if (slot == 0) break;
    ++pick[slot - 1];
    for (size_t k = slot; k < m; ++k) pick[k] = pick[k - 1] + 1;
  }
  return static_cast<double>(extreme) / static_cast<double>(splits);
}

double normal_approx_p(const std::vector<double>& x, const std::vector<double>& y,
                       double observed_dev) {
  const double m = static_cast<double>(x.size());
  const double n = static_cast<double>(y.size());
  const double total = m + n;

  std::vector<double> pooled(x);
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::sort(pooled.begin(), pooled.end());
  double tie_term = 0.0;
  size_t i = 0;
  while (i < pooled.size()) {
    size_t j = i;
    while (j + 1 < pooled.size() && pooled[j + 1] == pooled[i]) ++j;
    double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }

  double variance = m * n / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
  if (variance <= 0.0) return 1.0;  // every pooled value identical
  double z = (observed_dev - 0.5) / std::sqrt(variance);  // continuity correction
  if (z < 0.0) z = 0.0;
  return std::erfc(z / std::sqrt(2.0));
}

}  // namespace

MwuResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty())
    throw ConfigError("mann_whitney_u requires non-empty samples in both arms");
  const size_t m = x.size();
  const size_t n = y.size();

  std::vector<double> ranks = pooled_midranks(x, y);
  double rank_sum_x = 0.0;
  for (size_t i = 0; i < m; ++i) rank_sum_x += ranks[i];

  MwuResult result;
  result.u = rank_sum_x - static_cast<double>(m) * static_cast<double>(m + 1) / 2.0;
  const double mn = static_cast<double>(m) * static_cast<double>(n);
  const double observed_dev = std::abs(result.u - mn / 2.0);

  if (m * n <= 64) {
    result.exact = true;
    result.p_value = exact_permutation_p(ranks, m, observed_dev);
  } else {
    result.exact = false;
    result.p_value = normal_approx_p(x, y, observed_dev);
  }
  result.p_value = std::min(1.0, std::max(0.0, result.p_value));
  return result;
}

double a12(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty()) throw ConfigError("a12 requires non-empty samples in both arms");
  double wins = 0.0;
  for (double xi : x)
    for (double yj : y) {
      if (xi > yj)
        wins += 1.0;
      else if (xi == yj)
        wins += 0.5;
    }
  return wins / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

std::string_view effect_class_name(EffectClass c) {
  switch (c) {
    case EffectClass::None: return "none";
    case EffectClass::Small: return "small";
    case EffectClass::Medium: return "medium";
    case EffectClass::Large: return "large";
  }
  return "none";
}

EffectClass classify_effect(double a12_value, double p_value) {
  if (p_value >= 0.05) return EffectClass::None;
  const double d = std::abs(a12_value - 0.5);
  if (d >= 0.21) return EffectClass::Large;
  if (d >= 0.14) return EffectClass::Medium;
  if (d >= 0.06) return EffectClass::Small;
  return EffectClass::None;
}

std::string_view winner_name(Winner w) {
  switch (w) {
    case Winner::None: return "none";
    case Winner::Baseline: return "baseline";
    case Winner::Tool: return "tool";
  }
  return "none";
}

std::map<std::string, std::vector<double>> collect_samples(
    const std::vector<TrialResult>& results, Censoring censoring) {
  std::map<std::string, std::vector<double>> samples;
  if (results.empty()) return samples;
  for (const auto& [oracle, ms] : results.front().first_hit) samples[oracle];
  for (const TrialResult& r : results) {
    if (r.first_hit.size() != samples.size())
      throw ConfigError("trial results disagree on the oracle set");
    for (const auto& [oracle, ms] : r.first_hit) {
      auto it = samples.find(oracle);
      if (it == samples.end())
        throw ConfigError("trial results disagree on the oracle set: " + oracle);
      double value;
      if (ms) {
        value = static_cast<double>(*ms);
      } else if (censoring == Censoring::AtDuration) {
        value = static_cast<double>(r.duration_ms);
      } else {
        value = static_cast<double>(r.duration_ms) + 1.0;
      }
      it->second.push_back(value);
    }
  }
  return samples;
}

StatReport aggregate_report(const std::vector<TrialResult>& full,
                            const std::vector<TrialResult>& partial, Censoring censoring) {
  if (full.empty() || partial.empty())
    throw ConfigError("aggregate_report requires trials in both arms");

  auto full_samples = collect_samples(full, censoring);
  auto partial_samples = collect_samples(partial, censoring);
  {
    auto keys_of = [](const auto& m) {
      std::set<std::string> keys;
      for (const auto& [k, v] : m) keys.insert(k);
      return keys;
    };
    if (keys_of(full_samples) != keys_of(partial_samples))
      throw ConfigError("arms disagree on the oracle set");
  }

  StatReport report;
  report.oracle_count = full_samples.size();
  double a12_sum = 0.0;
  size_t a12_count = 0;

  for (const auto& [oracle, full_sample] : full_samples) {
    const std::vector<double>& partial_sample = partial_samples.at(oracle);
    OracleStats stats;
    stats.p_value = mann_whitney_u(full_sample, partial_sample).p_value;
    stats.a12_tool = a12(full_sample, partial_sample);
    stats.effect = classify_effect(stats.a12_tool, stats.p_value);
    if (stats.p_value < 0.05) {
      if (stats.a12_tool > 0.5) {
        stats.winner = Winner::Tool;
        ++report.significant_tool;
      } else if (stats.a12_tool < 0.5) {
        stats.winner = Winner::Baseline;
        ++report.significant_baseline;
      }
      a12_sum += stats.a12_tool;
      ++a12_count;
    }
    switch (stats.effect) {
      case EffectClass::Small: ++report.small_count; break;
      case EffectClass::Medium: ++report.medium_count; break;
      case EffectClass::Large: ++report.large_count; break;
      case EffectClass::None: break;
    }
    for (const TrialResult& r : full)
      if (r.first_hit.at(oracle)) ++stats.full_hits;
    for (const TrialResult& r : partial)
      if (r.first_hit.at(oracle)) ++stats.partial_hits;
    report.total_hits_full += stats.full_hits;
    report.total_hits_partial += stats.partial_hits;
    report.per_oracle.emplace(oracle, stats);
  }
  if (a12_count > 0) report.avg_a12_significant = a12_sum / static_cast<double>(a12_count);
  return report;
}

std::string report_to_json(const StatReport& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json oracles = nlohmann::ordered_json::object();
  for (const auto& [oracle, s] : r.per_oracle) {
    nlohmann::ordered_json o;
    o["p_value"] = s.p_value;
    o["a12"] = s.a12_tool;
    o["effect"] = std::string(effect_class_name(s.effect));
    o["winner"] = std::string(winner_name(s.winner));
    o["full_hits"] = s.full_hits;
    o["partial_hits"] = s.partial_hits;
    oracles[oracle] = std::move(o);
  }
  j["oracles"] = std::move(oracles);
  nlohmann::ordered_json summary;
  summary["oracle_count"] = r.oracle_count;
  summary["significant_tool"] = r.significant_tool;
  summary["significant_baseline"] = r.significant_baseline;
  summary["small"] = r.small_count;
  summary["medium"] = r.medium_count;
  summary["large"] = r.large_count;
  summary["avg_a12_significant"] = r.avg_a12_significant;
  summary["total_hits_full"] = r.total_hits_full;
  summary["total_hits_partial"] = r.total_hits_partial;
  j["summary"] = std::move(summary);
  return j.dump(2) + "\n";
}

std::string report_to_table(const StatReport& r) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %10s %13s %9s %7s %-7s %-9s\n", "oracle",
                "full hits", "partial hits", "p", "a12", "effect", "winner");
  out += line;
  for (const auto& [oracle, s] : r.per_oracle) {
    std::snprintf(line, sizeof line, "%-14s %10zu %13zu %9.4f %7.3f %-7s %-9s\n",
                  oracle.c_str(), s.full_hits, s.partial_hits, s.p_value, s.a12_tool,
                  std::string(effect_class_name(s.effect)).c_str(),
                  std::string(winner_name(s.winner)).c_str());
    out += line;
  }
  std::snprintf(line, sizeof line,
                "\nlocations: %zu   stat. sig. (tool/baseline): %zu/%zu   "
                "small: %zu  medium: %zu  large: %zu   avg a12 (sig.): %.2f\n",
                r.oracle_count, r.significant_tool, r.significant_baseline, r.small_count,
                r.medium_count, r.large_count, r.avg_a12_significant);
  out += line;
  std::snprintf(line, sizeof line, "total hits: full %llu, partial %llu\n",
                static_cast<unsigned long long>(r.total_hits_full),
                static_cast<unsigned long long>(r.total_hits_partial));
  out += line;
  return out;
}

}  // namespace uf
