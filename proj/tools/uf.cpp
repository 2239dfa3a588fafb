// uf: block-list-focused fuzzing toolkit.
//
// Pipeline: `scan` finds unsafe functions in Rust sources, `pathfind` turns
// a call graph plus that manifest into a block list, `fuzz` runs one trial
// with block-list-filtered coverage feedback, `campaign` A/B-tests filtered
// against unfiltered arms, `report` renders the statistics.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "uf/callgraph.hpp"
#include "uf/errors.hpp"
#include "uf/evalstats.hpp"
#include "uf/fuzzer.hpp"
#include "uf/harness.hpp"
#include "uf/pathfinder.hpp"
#include "uf/unsafescan.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw uf::Error("cannot read " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw uf::Error("error while reading " + path.string());
  return content;
}

// Write via a temp file in the same directory, then rename into place, so a
// failed run never leaves a half-written output.
void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw uf::Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw uf::Error("error while writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw uf::Error("cannot move " + tmp.string() + " to " + path.string() + ": " +
                          ec.message());
}

uint32_t map_size_from_env() {
  const char* raw = std::getenv("UF_MAP_SIZE");
  if (!raw || *raw == '\0') return uf::kDefaultMapSize;
  uint64_t value = 0;
  const char* end = raw + std::string_view(raw).size();
  auto [ptr, err] = std::from_chars(raw, end, value);
  if (err != std::errc{} || ptr != end || !uf::is_valid_map_size(value))
    throw uf::ConfigError("UF_MAP_SIZE must be a power of two >= 256, got \"" +
                          std::string(raw) + "\"");
  return static_cast<uint32_t>(value);
}

// ---------------------------------------------------------------------------
// scan

std::vector<fs::path> collect_rust_files(const std::vector<std::string>& srcs) {
  std::vector<fs::path> files;
  for (const auto& src : srcs) {
    fs::path p(src);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      for (const auto& entry : fs::recursive_directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".rs")
          files.push_back(entry.path());
      }
    } else if (fs::is_regular_file(p, ec)) {
      files.push_back(p);
    } else {
      throw uf::Error("source path is neither file nor directory: " + src);
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_scan(const std::vector<std::string>& srcs, const std::string& out) {
  std::vector<uf::SourceFile> sources;
  for (const fs::path& file : collect_rust_files(srcs))
    sources.push_back({file.generic_string(), read_file(file)});
  uf::ScanResult result = uf::scan_source(sources);
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
  write_file_atomic(out, uf::write_manifest(result.manifest));
  std::cout << "scanned " << sources.size() << " files: " << result.manifest.functions.size()
            << " unsafe functions, " << result.warnings.size() << " warnings -> " << out
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// pathfind

bool looks_like_dot(std::string_view text) {
  size_t pos = 0;
  while (pos < text.size()) {
    char c = text[pos];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else if (c == '#' || (c == '/' && pos + 1 < text.size() && text[pos + 1] == '/')) {
      while (pos < text.size() && text[pos] != '\n') ++pos;
    } else if (c == '/' && pos + 1 < text.size() && text[pos + 1] == '*') {
      size_t close = text.find("*/", pos + 2);
      pos = close == std::string_view::npos ? text.size() : close + 2;
    } else {
      break;
    }
  }
  return text.substr(pos, 7) == "digraph";
}

// Whole-symbol rename table, `from<TAB>to` per line, for bridging manifests
// that use plain names to call graphs that use mangled ones.
std::map<std::string, std::string> load_symbol_map(const std::string& file) {
  std::map<std::string, std::string> map;
  std::string text = read_file(file);
  size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) {
      if (pos == text.size()) break;
      eol = text.size();
    }
    ++line_no;
    std::string_view line = std::string_view(text).substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string_view::npos)
      throw uf::ParseError("symbol map line " + std::to_string(line_no) +
                           ": expected 'from<TAB>to'");
    map[std::string(line.substr(0, tab))] = std::string(line.substr(tab + 1));
  }
  return map;
}

int cmd_pathfind(const std::vector<std::string>& graph_files, const std::string& manifest_file,
                 const std::string& symbol_map_file, bool conservative, const std::string& format,
                 const std::string& out) {
  std::vector<uf::CallGraph> graphs;
  for (const auto& file : graph_files) {
    std::string text = read_file(file);
    graphs.push_back(looks_like_dot(text) ? uf::parse_dot(text) : uf::parse_edgelist(text));
  }
  uf::CallGraph graph = uf::merge(graphs);
  uf::UnsafeManifest manifest = uf::load_manifest(read_file(manifest_file));
  if (!symbol_map_file.empty()) {
    auto map = load_symbol_map(symbol_map_file);
    uf::UnsafeManifest renamed;
    for (const auto& f : manifest.functions) {
      auto it = map.find(f);
      renamed.functions.insert(it != map.end() ? it->second : f);
    }
    manifest = std::move(renamed);
  }
  if (manifest.functions.empty())
    std::cerr << "warning: unsafe manifest is empty; every function will be blocked\n";

  uf::PathfinderResult result = uf::compute_blocklist(
      graph, manifest,
      conservative ? uf::BlocklistMode::ConservativeIndirect : uf::BlocklistMode::Standard);
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";

  uf::BlocklistFormat fmt = format == "afl-denylist" ? uf::BlocklistFormat::AflDenylist
                                                     : uf::BlocklistFormat::Plain;
  write_file_atomic(out, uf::write_blocklist(result.blocklist, fmt));

  const auto& stats = result.stats;
  std::printf("functions:        %zu\n", stats.total_nodes);
  std::printf("unsafe in graph:  %zu\n", stats.unsafe_in_graph);
  std::printf("manifest missing: %zu\n", stats.manifest_missing);
  std::printf("blocked:          %zu (%.2f%%)\n", stats.blocked, stats.blocked_fraction * 100.0);
  std::printf("block list -> %s\n", out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// fuzz / campaign / report

std::vector<std::vector<uint8_t>> read_corpus_dir(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  if (files.empty()) throw uf::ConfigError("corpus directory has no files: " + dir);
  std::sort(files.begin(), files.end());
  std::vector<std::vector<uint8_t>> corpus;
  for (const fs::path& f : files) {
    std::string text = read_file(f);
    corpus.emplace_back(text.begin(), text.end());
  }
  return corpus;
}

int cmd_fuzz(const std::string& target, const std::string& blocklist_file, uint64_t duration_ms,
             uint64_t rng_seed, const std::string& corpus_dir, const std::string& out,
             bool wall_clock) {
  uf::TrialConfig cfg;
  cfg.target = target;
  cfg.duration_ms = duration_ms;
  cfg.rng_seed = rng_seed;
  cfg.map_size = map_size_from_env();
  cfg.clock = wall_clock ? uf::ClockMode::WallClock : uf::ClockMode::Virtual;
  if (!blocklist_file.empty()) cfg.blocklist = uf::load_blocklist(read_file(blocklist_file));
  if (!corpus_dir.empty()) cfg.initial_corpus = read_corpus_dir(corpus_dir);

  uf::TrialResult result = uf::run_trial(cfg);
  write_file_atomic(out, uf::trial_result_to_json(result));

  size_t hit = 0;
  for (const auto& [oracle, ms] : result.first_hit)
    if (ms) ++hit;
  std::cout << "trial done: " << result.executions << " executions, corpus "
            << result.corpus_size << ", oracles hit " << hit << "/" << result.first_hit.size()
            << ", crashes " << result.crashes << " -> " << out << "\n";
  return 0;
}

ordered_json campaign_to_json(const uf::CampaignConfig& cfg, const uf::CampaignResult& result,
                              const uf::StatReport& report) {
  ordered_json doc;
  doc["target"] = cfg.target;
  doc["trials"] = cfg.trials;
  doc["duration_ms"] = cfg.duration_ms;
  doc["rng_seed"] = cfg.rng_seed;
  doc["map_size"] = cfg.map_size;
  doc["ab_identical"] = cfg.ab_identical;
  const auto& stats = result.pathfinder_stats;
  doc["pathfinder"] = {{"total_nodes", stats.total_nodes},
                       {"unsafe_in_graph", stats.unsafe_in_graph},
                       {"manifest_missing", stats.manifest_missing},
                       {"blocked", stats.blocked},
                       {"blocked_fraction", stats.blocked_fraction}};
  doc["blocklist"] = result.blocklist.functions;
  ordered_json full = ordered_json::array();
  for (const auto& r : result.full) full.push_back(ordered_json::parse(uf::trial_result_to_json(r)));
  doc["full"] = std::move(full);
  ordered_json partial = ordered_json::array();
  for (const auto& r : result.partial)
    partial.push_back(ordered_json::parse(uf::trial_result_to_json(r)));
  doc["partial"] = std::move(partial);
  doc["report"] = ordered_json::parse(uf::report_to_json(report));
  return doc;
}

int cmd_campaign(const std::string& target, uint32_t trials, uint64_t duration_ms,
                 uint64_t rng_seed, const std::string& out, uint32_t jobs, bool ab_identical) {
  uf::CampaignConfig cfg;
  cfg.target = target;
  cfg.trials = trials;
  cfg.duration_ms = duration_ms;
  cfg.rng_seed = rng_seed;
  cfg.jobs = jobs;
  cfg.ab_identical = ab_identical;
  cfg.map_size = map_size_from_env();

  uf::CampaignResult result = uf::run_campaign(cfg);
  uf::StatReport report = uf::aggregate_report(result.full, result.partial);
  write_file_atomic(out, campaign_to_json(cfg, result, report).dump(2) + "\n");
  std::cout << uf::report_to_table(report);
  std::cout << "campaign -> " << out << "\n";
  return 0;
}

uf::TrialResult trial_from_json(const ordered_json& j, uint64_t duration_ms) {
  uf::TrialResult r;
  r.target = j.at("target").get<std::string>();
  r.arm = j.at("arm").get<std::string>();
  r.trial_index = j.at("trial_index").get<uint32_t>();
  r.rng_seed = j.at("rng_seed").get<uint64_t>();
  r.executions = j.at("executions").get<uint64_t>();
  for (const auto& [oracle, ms] : j.at("first_hit").items()) {
    if (ms.is_null())
      r.first_hit[oracle] = std::nullopt;
    else
      r.first_hit[oracle] = ms.get<uint64_t>();
  }
  r.corpus_size = j.at("corpus_size").get<size_t>();
  r.crashes = j.at("crashes").get<size_t>();
  r.duration_ms = duration_ms;
  return r;
}

int cmd_report(const std::string& in, const std::string& format, const std::string& censoring) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(read_file(in));
  } catch (const nlohmann::json::exception& e) {
    throw uf::ParseError(in + ": " + e.what());
  }
  std::vector<uf::TrialResult> full, partial;
  try {
    uint64_t duration_ms = doc.at("duration_ms").get<uint64_t>();
    for (const auto& t : doc.at("full")) full.push_back(trial_from_json(t, duration_ms));
    for (const auto& t : doc.at("partial")) partial.push_back(trial_from_json(t, duration_ms));
  } catch (const nlohmann::json::exception& e) {
    throw uf::ParseError(in + ": not a campaign document: " + e.what());
  }
  uf::Censoring c =
      censoring == "tied-max" ? uf::Censoring::TiedMax : uf::Censoring::AtDuration;
  uf::StatReport report = uf::aggregate_report(full, partial, c);
  if (format == "json")
    std::cout << uf::report_to_json(report);
  else
    std::cout << uf::report_to_table(report);
  return 0;
}

// ---------------------------------------------------------------------------
// targets

int cmd_targets(const std::string& export_dir) {
  for (const uf::TargetProgram& t : uf::list_targets()) {
    uf::PathfinderResult pf = uf::compute_blocklist(t.callgraph, t.unsafe_manifest);
    std::printf("%-14s %3zu functions, %3zu blocked (%5.1f%%), %zu oracle%s\n", t.name.c_str(),
                pf.stats.total_nodes, pf.stats.blocked, pf.stats.blocked_fraction * 100.0,
                t.oracles.size(), t.oracles.size() == 1 ? "" : "s");
    std::printf("    %s\n", t.description.c_str());
  }
  if (export_dir.empty()) return 0;

  for (const uf::TargetProgram& t : uf::list_targets()) {
    fs::path base = fs::path(export_dir) / t.name;
    fs::create_directories(base / "src");
    fs::create_directories(base / "corpus");
    write_file_atomic(base / "callgraph.tsv", uf::serialize_edgelist(t.callgraph));
    write_file_atomic(base / "unsafe.txt", uf::write_manifest(t.unsafe_manifest));
    for (const uf::SourceFile& s : t.sources)
      write_file_atomic(base / "src" / fs::path(s.path).filename(), s.text);
    for (size_t i = 0; i < t.default_corpus.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "seed_%03zu", i);
      const auto& bytes = t.default_corpus[i];
      write_file_atomic(base / "corpus" / name,
                        std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                         bytes.size()));
    }
    std::printf("exported %s -> %s\n", t.name.c_str(), base.generic_string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"block-list-focused fuzzing toolkit"};
  app.require_subcommand(1);

  // scan
  std::vector<std::string> scan_srcs;
  std::string scan_out;
  CLI::App* scan = app.add_subcommand("scan", "find unsafe functions in Rust sources");
  scan->add_option("--src", scan_srcs, "source file or directory")->required();
  scan->add_option("--out", scan_out, "manifest output path")->required();

  // pathfind
  std::vector<std::string> pf_graphs;
  std::string pf_manifest, pf_symbol_map, pf_format = "plain", pf_out;
  bool pf_conservative = false;
  CLI::App* pathfind =
      app.add_subcommand("pathfind", "compute the block list from call graph and manifest");
  pathfind->add_option("--callgraph", pf_graphs, "edge-list or DOT call graph file")->required();
  pathfind->add_option("--unsafe", pf_manifest, "unsafe-function manifest")->required();
  pathfind->add_option("--symbol-map", pf_symbol_map,
                       "'from<TAB>to' rename table applied to manifest symbols");
  pathfind->add_flag("--conservative-indirect", pf_conservative,
                     "treat functions with indirect call sites as reaching unsafe code");
  pathfind->add_option("--format", pf_format, "block list format")
      ->check(CLI::IsMember({"plain", "afl-denylist"}));
  pathfind->add_option("--out", pf_out, "block list output path")->required();

  // fuzz
  std::string fz_target, fz_blocklist, fz_corpus, fz_out;
  uint64_t fz_duration = 0, fz_seed = 0;
  bool fz_wall = false;
  CLI::App* fuzz = app.add_subcommand("fuzz", "run one fuzzing trial on a bundled target");
  fuzz->add_option("--target", fz_target, "bundled target name")->required();
  fuzz->add_option("--blocklist", fz_blocklist, "block list file (plain or afl-denylist)");
  fuzz->add_option("--duration-ms", fz_duration, "trial duration in milliseconds")
      ->required()
      ->check(CLI::PositiveNumber);
  fuzz->add_option("--rng-seed", fz_seed, "random seed")->required();
  fuzz->add_option("--corpus", fz_corpus, "seed corpus directory (default: bundled seeds)");
  fuzz->add_option("--out", fz_out, "trial result JSON path")->required();
  fuzz->add_flag("--wall-clock", fz_wall, "measure real time instead of virtual time");

  // campaign
  std::string cp_target, cp_out;
  uint32_t cp_trials = 0, cp_jobs = 1;
  uint64_t cp_duration = 0, cp_seed = 0;
  bool cp_ab = false;
  CLI::App* campaign = app.add_subcommand("campaign", "paired A/B campaign + statistics");
  campaign->add_option("--target", cp_target, "bundled target name")->required();
  campaign->add_option("--trials", cp_trials, "trials per arm (>= 2)")
      ->required()
      ->check(CLI::PositiveNumber);
  campaign->add_option("--duration-ms", cp_duration, "per-trial duration in milliseconds")
      ->required()
      ->check(CLI::PositiveNumber);
  campaign->add_option("--rng-seed", cp_seed, "master seed for the paired trial seeds")
      ->required();
  campaign->add_option("--out", cp_out, "campaign document path")->required();
  campaign->add_option("--jobs", cp_jobs, "parallel trials")->check(CLI::PositiveNumber);
  campaign->add_flag("--ab-identical", cp_ab, "run both arms unfiltered (sanity mode)");

  // report
  std::string rp_in, rp_format, rp_censoring = "duration";
  CLI::App* report = app.add_subcommand("report", "render a campaign document");
  report->add_option("--in", rp_in, "campaign JSON")->required();
  report->add_option("--format", rp_format, "output format")
      ->required()
      ->check(CLI::IsMember({"table", "json"}));
  report->add_option("--censoring", rp_censoring, "censored-trial handling")
      ->check(CLI::IsMember({"duration", "tied-max"}));

  // targets
  std::string tg_export;
  CLI::App* targets = app.add_subcommand("targets", "list bundled targets");
  targets->add_option("--export", tg_export, "write call graph, manifest, sources and corpus");

  CLI11_PARSE(app, argc, argv);

  try {
    if (scan->parsed()) return cmd_scan(scan_srcs, scan_out);
    if (pathfind->parsed())
      return cmd_pathfind(pf_graphs, pf_manifest, pf_symbol_map, pf_conservative, pf_format,
                          pf_out);
    if (fuzz->parsed())
      return cmd_fuzz(fz_target, fz_blocklist, fz_duration, fz_seed, fz_corpus, fz_out, fz_wall);
    if (campaign->parsed())
      return cmd_campaign(cp_target, cp_trials, cp_duration, cp_seed, cp_out, cp_jobs, cp_ab);
    if (report->parsed()) return cmd_report(rp_in, rp_format, rp_censoring);
    if (targets->parsed()) return cmd_targets(tg_export);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
