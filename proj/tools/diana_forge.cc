// diana-forge: builds dialogue-narrative corpora from subtitle and synopsis
// files.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 input error,
// 3 when no title could be processed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "diana/error.h"
#include "diana/pipeline.h"

namespace fs = std::filesystem;
using namespace diana;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNothingBuilt = 3;

struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::int64_t> delta_t;
  std::optional<int> k;
  std::optional<std::string> measure;
  std::optional<double> cov_min;
  std::optional<double> den_min;
  std::optional<double> link_threshold;
  std::optional<std::string> trailing;
  std::optional<int> workers;
};

void SetupLogging() {
  auto logger = spdlog::stderr_color_mt("diana-forge");
  logger->set_pattern("%^[%l]%$ %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  const char* env = std::getenv("DIANA_FORGE_LOG");
  if (env == nullptr || *env == '\0') return;
  const std::string level = env;
  if (level == "error" || level == "warn" || level == "info" || level == "debug") {
    spdlog::set_level(spdlog::level::from_str(level));
  } else {
    spdlog::warn("ignoring DIANA_FORGE_LOG={}: expected error, warn, info or debug", level);
  }
}

// Config file first, then explicit flags on top.
PipelineConfig ResolveConfig(const Overrides& o) {
  PipelineConfig config;
  if (o.config_path) {
    std::string text;
    try {
      text = ReadTextFile(*o.config_path);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidConfig, e.what());
    }
    config = ConfigFromJson(text, config);
  }
  if (o.delta_t) config.delta_t_ms = *o.delta_t;
  if (o.k) config.max_skip = *o.k;
  if (o.measure) {
    const auto m = ParseMeasure(*o.measure);
    if (!m) throw Error(ErrorCode::kInvalidConfig, "unknown measure '" + *o.measure + "'");
    config.measure = *m;
  }
  if (o.cov_min) config.cov_min = *o.cov_min;
  if (o.den_min) config.den_min = *o.den_min;
  if (o.link_threshold) config.link_threshold = *o.link_threshold;
  if (o.trailing) {
    if (*o.trailing == "unbounded") {
      config.trailing = TrailingSkip::kUnbounded;
    } else if (*o.trailing == "bounded") {
      config.trailing = TrailingSkip::kBounded;
    } else {
      throw Error(ErrorCode::kInvalidConfig, "unknown trailing skip '" + *o.trailing + "'");
    }
  }
  if (o.workers) config.workers = *o.workers;
  config.Validate();
  spdlog::debug("config: {}", ConfigToJson(config));
  return config;
}

void AddConfigFlags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file; flags override it");
  cmd->add_option("--delta-t", o.delta_t, "session gap threshold in milliseconds");
  cmd->add_option("--k", o.k, "maximum narrative segments skipped per step");
  cmd->add_option("--measure", o.measure,
                  "jaccard, rouge1f, tfidf, tfidf_normalized or tfidf_vecnorm");
  cmd->add_option("--cov-min", o.cov_min, "keep pairs with coverage above this");
  cmd->add_option("--den-min", o.den_min, "keep pairs with density above this");
  cmd->add_option("--link-threshold", o.link_threshold, "role-name overlap needed to link");
  cmd->add_option("--trailing-skip", o.trailing, "unbounded or bounded");
  cmd->add_option("--workers", o.workers, "worker threads");
}

// Writes to `path`, or stdout when empty.
void Emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path);
}

std::vector<PairRecord> ReadCorpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingInput, "cannot open " + path);
  return ReadJsonl(in);
}

LinkReport LoadManifest(const std::string& path) { return ParseManifest(ReadTextFile(path)); }

int CmdLink(const std::string& dir, const Overrides& o, const std::string& out) {
  const PipelineConfig config = ResolveConfig(o);
  const auto sidecars = LoadSidecars(dir);
  const LinkReport report = LinkTitles(sidecars, config.link_threshold);
  for (const auto& w : report.warnings) spdlog::warn("{}", w);
  for (const auto& s : report.skipped) spdlog::info("skipped {}: {}", s.id, s.reason);
  if (sidecars.empty()) spdlog::warn("no sidecar files found in {}", dir);
  Emit(out, ManifestToJson(report) + "\n");
  spdlog::info("linked {} titles, skipped {}", report.titles.size(), report.skipped.size());
  return kExitOk;
}

int CmdBuild(const std::string& manifest, const Overrides& o, const std::string& out,
             const std::string& stats_out) {
  const PipelineConfig config = ResolveConfig(o);
  const LinkReport report = LoadManifest(manifest);
  BuildSummary summary;
  if (out.empty()) {
    summary = RunBuild(report.titles, config, std::cout);
    std::cout.flush();
  } else {
    std::ofstream sink(out, std::ios::binary);
    if (!sink) throw Error(ErrorCode::kIoFailure, "cannot write " + out);
    summary = RunBuild(report.titles, config, sink);
    sink.close();
    if (!sink) throw Error(ErrorCode::kIoFailure, "cannot write " + out);
  }
  const std::string summary_json = BuildSummaryToJson(summary);
  if (!stats_out.empty()) Emit(stats_out, summary_json + "\n");
  spdlog::info("{} titles ok, {} failed, {} of {} pairs kept", summary.titles_ok,
               summary.titles_failed, summary.pairs_written, summary.candidate_pairs);
  if (!report.titles.empty() && summary.titles_ok == 0) {
    spdlog::error("no title could be processed");
    return kExitNothingBuilt;
  }
  return kExitOk;
}

int CmdAlign(const std::string& srt, const std::string& synopsis, const Overrides& o,
             const std::string& out, const std::string& matrix_out) {
  const PipelineConfig config = ResolveConfig(o);
  const TitleAlignment aligned = AlignTitle(ReadTextFile(srt), ReadTextFile(synopsis), config);
  spdlog::info("{} segments, {} sessions, score {}", aligned.segments.size(),
               aligned.sessions.size(), aligned.alignment.score);
  if (!matrix_out.empty()) Emit(matrix_out, aligned.sim.ToJson() + "\n");
  Emit(out, AlignmentToJson(aligned.alignment, config.max_skip, config.measure) + "\n");
  return kExitOk;
}

int CmdEval(const std::string& manifest, const Overrides& o, const std::string& gold,
            const std::vector<std::string>& measure_names, const std::string& out) {
  Overrides base = o;
  base.measure.reset();
  const PipelineConfig config = ResolveConfig(base);
  std::vector<Measure> measures;
  for (const auto& name : measure_names) {
    if (name == "all") {
      measures.assign(std::begin(kEvalMeasures), std::end(kEvalMeasures));
      continue;
    }
    const auto m = ParseMeasure(name);
    if (!m) throw Error(ErrorCode::kInvalidConfig, "unknown measure '" + name + "'");
    measures.push_back(*m);
  }
  if (measures.empty()) measures.assign(std::begin(kEvalMeasures), std::end(kEvalMeasures));
  const LinkReport report = LoadManifest(manifest);
  const auto eval = RunEval(report.titles, gold, measures, config);
  for (const auto& m : eval) {
    spdlog::info("{}: accuracy {:.4f}, adjacency {:.4f}", MeasureName(m.measure), m.accuracy(),
                 m.adjacency_error_rate());
  }
  Emit(out, EvalReportToJson(eval, config) + "\n");
  return kExitOk;
}

int CmdFilter(const std::string& corpus, const Overrides& o, const std::string& out) {
  const PipelineConfig config = ResolveConfig(o);
  const auto pairs = ReadCorpus(corpus);
  const auto kept = FilterPairs(pairs, config.cov_min, config.den_min);
  std::ostringstream sink;
  WriteJsonl(kept, sink);
  Emit(out, sink.str());
  spdlog::info("kept {} of {} pairs", kept.size(), pairs.size());
  return kExitOk;
}

int CmdStats(const std::string& corpus, const std::string& out) {
  Emit(out, StatsToJson(Stats(ReadCorpus(corpus))) + "\n");
  return kExitOk;
}

int ExitCodeFor(ErrorCode code) {
  return code == ErrorCode::kInvalidConfig ? kExitUsage : kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  SetupLogging();

  CLI::App app{"Build dialogue-narrative parallel corpora from subtitles and synopses"};
  app.require_subcommand(1);
  Overrides o;
  std::string out, stats_out, matrix_out, gold;
  std::string input, second_input;
  std::vector<std::string> eval_measures;

  auto* link = app.add_subcommand("link", "pair subtitle and synopsis files into a manifest");
  link->add_option("metadata_dir", input, "directory of title sidecar JSON files")->required();
  link->add_option("--out", out, "manifest path (default stdout)");
  AddConfigFlags(link, o);

  auto* build = app.add_subcommand("build", "run the full pipeline and write a JSONL corpus");
  build->add_option("manifest", input, "manifest written by link")->required();
  build->add_option("--out", out, "corpus path (default stdout)");
  build->add_option("--stats-out", stats_out, "write the build summary JSON here");
  AddConfigFlags(build, o);

  auto* align = app.add_subcommand("align", "align one subtitle file with one synopsis");
  align->add_option("subtitle", input, "SRT file")->required();
  align->add_option("synopsis", second_input, "plain-text synopsis")->required();
  align->add_option("--out", out, "alignment JSON path (default stdout)");
  align->add_option("--matrix-out", matrix_out, "write the similarity matrix JSON here");
  AddConfigFlags(align, o);

  auto* eval = app.add_subcommand("eval", "score alignments against gold files");
  eval->add_option("manifest", input, "manifest written by link")->required();
  eval->add_option("--gold", gold, "directory of <id>.json gold alignments")->required();
  eval->add_option("--out", out, "report path (default stdout)");
  AddConfigFlags(eval, o);
  eval->remove_option(eval->get_option("--measure"));
  eval->add_option("--measure", eval_measures,
                   "measure to evaluate, repeatable; 'all' or omitted for the four standard ones");

  auto* filter = app.add_subcommand("filter", "apply coverage/density thresholds to a corpus");
  filter->add_option("corpus", input, "JSONL corpus")->required();
  filter->add_option("--out", out, "output path (default stdout)");
  AddConfigFlags(filter, o);

  auto* stats = app.add_subcommand("stats", "summary statistics of a corpus");
  stats->add_option("corpus", input, "JSONL corpus")->required();
  stats->add_option("--out", out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*link) return CmdLink(input, o, out);
    if (*build) return CmdBuild(input, o, out, stats_out);
    if (*align) return CmdAlign(input, second_input, o, out, matrix_out);
    if (*eval) return CmdEval(input, o, gold, eval_measures, out);
    if (*filter) return CmdFilter(input, o, out);
    if (*stats) return CmdStats(input, out);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  }
  return kExitUsage;
}
