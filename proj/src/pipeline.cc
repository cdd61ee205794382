#include "diana/pipeline.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

#include <spdlog/spdlog.h>

#include "diana/error.h"
#include "diana/refine.h"
#include "json.hpp"

namespace diana {

void PipelineConfig::Validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (delta_t_ms <= 0) fail("delta_t_ms must be positive");
  if (max_skip < 0) fail("K must be non-negative");
  if (!std::isfinite(cov_min) || cov_min < 0.0) fail("cov_min must be a finite value >= 0");
  if (!std::isfinite(den_min) || den_min < 0.0) fail("den_min must be a finite value >= 0");
  if (!(link_threshold >= 0.0 && link_threshold <= 1.0)) fail("link_threshold must lie in [0, 1]");
  if (workers < 1) fail("workers must be at least 1");
}

PipelineConfig ConfigFromJson(std::string_view text, PipelineConfig base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be a JSON object");
  PipelineConfig c = base;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "delta_t_ms") {
        c.delta_t_ms = value.get<std::int64_t>();
      } else if (key == "K") {
        c.max_skip = value.get<int>();
      } else if (key == "measure") {
        const auto m = ParseMeasure(value.get<std::string>());
        if (!m) throw Error(ErrorCode::kInvalidConfig, "unknown measure '" + value.get<std::string>() + "'");
        c.measure = *m;
      } else if (key == "cov_min") {
        c.cov_min = value.get<double>();
      } else if (key == "den_min") {
        c.den_min = value.get<double>();
      } else if (key == "link_threshold") {
        c.link_threshold = value.get<double>();
      } else if (key == "trailing_skip") {
        const auto t = value.get<std::string>();
        if (t == "unbounded") {
          c.trailing = TrailingSkip::kUnbounded;
        } else if (t == "bounded") {
          c.trailing = TrailingSkip::kBounded;
        } else {
          throw Error(ErrorCode::kInvalidConfig, "trailing_skip must be 'unbounded' or 'bounded'");
        }
      } else if (key == "workers") {
        c.workers = value.get<int>();
      } else {
        throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("config value: ") + e.what());
  }
  c.Validate();
  return c;
}

std::string ConfigToJson(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["delta_t_ms"] = c.delta_t_ms;
  j["K"] = c.max_skip;
  j["measure"] = MeasureName(c.measure);
  j["cov_min"] = c.cov_min;
  j["den_min"] = c.den_min;
  j["link_threshold"] = c.link_threshold;
  j["trailing_skip"] = TrailingSkipName(c.trailing);
  j["workers"] = c.workers;
  return j.dump(2);
}

// ---------------------------------------------------------------------------

LinkReport LinkTitles(std::span<const TitleSidecar> sidecars, double threshold) {
  std::vector<const TitleSidecar*> subs, syns;
  for (const auto& sc : sidecars) {
    if (sc.subtitle_path) subs.push_back(&sc);
    if (sc.synopsis_path) syns.push_back(&sc);
  }
  auto by_id = [](const TitleSidecar* a, const TitleSidecar* b) { return a->id < b->id; };
  std::stable_sort(subs.begin(), subs.end(), by_id);
  std::stable_sort(syns.begin(), syns.end(), by_id);

  LinkReport report;
  std::set<const TitleSidecar*> used;
  std::set<std::string> reported;

  for (const TitleSidecar* sub : subs) {
    const TitleMeta sub_meta = sub->meta();
    std::vector<const TitleSidecar*> candidates;
    bool same_title_year = false;
    double best_overlap = 0.0;
    bool blocked_by_use = false;
    for (const TitleSidecar* syn : syns) {
      const TitleMeta syn_meta = syn->meta();
      if (syn_meta.title != sub_meta.title || syn_meta.year != sub_meta.year) continue;
      same_title_year = true;
      const double overlap = RoleNameOverlap(sub_meta.role_names, syn_meta.role_names);
      best_overlap = std::max(best_overlap, overlap);
      if (!Link(sub_meta, syn_meta, threshold)) continue;
      if (used.contains(syn)) {
        blocked_by_use = true;
        continue;
      }
      candidates.push_back(syn);
    }
    // A sidecar carrying both files is paired with itself first.
    std::stable_partition(candidates.begin(), candidates.end(),
                          [sub](const TitleSidecar* s) { return s == sub; });

    if (candidates.empty()) {
      std::string reason;
      if (!same_title_year) {
        reason = "no synopsis with matching title and year";
      } else if (blocked_by_use) {
        reason = "every matching synopsis is already linked";
      } else {
        reason = "role-name overlap " + FormatDecimal(best_overlap) + " not above " +
                 FormatDecimal(threshold);
      }
      report.skipped.push_back({sub->id, reason});
      reported.insert(sub->id);
      continue;
    }
    const TitleSidecar* syn = candidates.front();
    if (candidates.size() > 1) {
      std::string ids;
      for (const auto* c : candidates) ids += (ids.empty() ? "" : ", ") + c->id;
      report.warnings.push_back("title+year collision for '" + sub->title + "' (" +
                                std::to_string(sub->year) + "): synopses " + ids +
                                " qualify; linked '" + syn->id + "'");
    }
    used.insert(syn);
    ManifestEntry entry;
    entry.id = sub->id;
    entry.title = sub->title;
    entry.year = sub->year;
    entry.subtitle_path = *sub->subtitle_path;
    entry.synopsis_path = *syn->synopsis_path;
    entry.role_overlap = RoleNameOverlap(sub_meta.role_names, syn->meta().role_names);
    report.titles.push_back(std::move(entry));
    reported.insert(sub->id);
  }

  for (const TitleSidecar* syn : syns) {
    if (used.contains(syn) || reported.contains(syn->id)) continue;
    report.skipped.push_back({syn->id, "no linked subtitle for this synopsis"});
  }
  return report;
}

std::string ManifestToJson(const LinkReport& report) {
  nlohmann::ordered_json titles = nlohmann::ordered_json::array();
  for (const auto& t : report.titles) {
    nlohmann::ordered_json e;
    e["id"] = t.id;
    e["title"] = t.title;
    e["year"] = t.year;
    e["subtitle_path"] = t.subtitle_path.generic_string();
    e["synopsis_path"] = t.synopsis_path.generic_string();
    e["role_overlap"] = t.role_overlap;
    titles.push_back(std::move(e));
  }
  nlohmann::ordered_json skipped = nlohmann::ordered_json::array();
  for (const auto& s : report.skipped) skipped.push_back({{"id", s.id}, {"reason", s.reason}});
  nlohmann::ordered_json out;
  out["titles"] = std::move(titles);
  out["skipped"] = std::move(skipped);
  out["warnings"] = report.warnings;
  return out.dump(2);
}

LinkReport ParseManifest(std::string_view text) {
  LinkReport report;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& e : j.at("titles")) {
      ManifestEntry entry;
      entry.id = e.at("id").get<std::string>();
      entry.title = e.value("title", std::string());
      entry.year = e.value("year", 0);
      entry.subtitle_path = e.at("subtitle_path").get<std::string>();
      entry.synopsis_path = e.at("synopsis_path").get<std::string>();
      entry.role_overlap = e.value("role_overlap", 0.0);
      report.titles.push_back(std::move(entry));
    }
    if (j.contains("skipped")) {
      for (const auto& s : j["skipped"]) {
        report.skipped.push_back({s.at("id").get<std::string>(), s.at("reason").get<std::string>()});
      }
    }
    if (j.contains("warnings")) report.warnings = j["warnings"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseFailure, std::string("manifest: ") + e.what());
  }
  return report;
}

// ---------------------------------------------------------------------------

TitleAlignment AlignTitle(std::string_view srt, std::string_view synopsis,
                          const PipelineConfig& config, Measure measure) {
  TitleAlignment out;
  const auto cues = ParseSrt(srt);
  const auto utterances = CuesToUtterances(cues);
  out.sessions = SplitSessions(utterances, config.delta_t_ms);
  out.segments = SplitSentences(synopsis);
  out.sim = ComputeSimilarity(out.segments, out.sessions, measure);
  out.alignment = Align(out.sim, config.max_skip, config.trailing);
  return out;
}

TitlePairs BuildPairs(const std::string& title_id, const TitleAlignment& aligned,
                      const PipelineConfig& config) {
  TitlePairs out;
  const auto pools = MergeNeighbors(InvertAlignment(aligned.alignment));
  for (const auto& pool : pools) {
    const NarrativeSegment& segment = aligned.segments[static_cast<std::size_t>(pool.narrative)];
    const SelectedPair pick = GreedySelect(segment.text, pool, aligned.sessions);
    if (pick.selected.empty()) continue;
    ++out.candidates;

    std::vector<const DialogueSession*> chosen;
    double sim_sum = 0.0;
    PairRecord record;
    for (int j : pick.selected) {
      chosen.push_back(&aligned.sessions[static_cast<std::size_t>(j)]);
      sim_sum += aligned.sim(static_cast<std::size_t>(pool.narrative), static_cast<std::size_t>(j));
      record.dialogue_ids.push_back(j + 1);
    }
    record.title_id = title_id;
    record.narrative_id = segment.id;
    record.dialogue = SerializeDialogue(chosen);
    record.narrative = segment.text;
    const QualityScores q = ScorePair(record.dialogue, record.narrative);
    record.coverage = q.coverage;
    record.density = q.density;
    record.align_score = sim_sum / static_cast<double>(pick.selected.size());
    if (!PassesFilter(q, config.cov_min, config.den_min)) continue;
    out.kept.push_back(std::move(record));
  }
  return out;
}

TitleOutcome BuildTitle(const ManifestEntry& entry, const PipelineConfig& config) {
  TitleOutcome outcome;
  outcome.id = entry.id;
  try {
    const std::string srt = ReadTextFile(entry.subtitle_path);
    const std::string synopsis = ReadTextFile(entry.synopsis_path);
    const TitleAlignment aligned = AlignTitle(srt, synopsis, config);
    outcome.pairs = BuildPairs(entry.id, aligned, config);
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

BuildSummary RunBuild(std::span<const ManifestEntry> titles, const PipelineConfig& config,
                      std::ostream& sink) {
  config.Validate();
  BuildSummary summary;
  std::vector<PairRecord> written;

  OrderedParallel<TitleOutcome>(
      titles.size(), config.workers,
      [&](std::size_t i) { return BuildTitle(titles[i], config); },
      [&](std::size_t, TitleOutcome& outcome) {
        if (outcome.error) {
          ++summary.titles_failed;
          spdlog::warn("title '{}' skipped: {}", outcome.id, *outcome.error);
          return;
        }
        ++summary.titles_ok;
        summary.candidate_pairs += outcome.pairs.candidates;
        summary.pairs_written += WriteJsonl(outcome.pairs.kept, sink);
        spdlog::debug("title '{}': {} of {} pairs kept", outcome.id, outcome.pairs.kept.size(),
                      outcome.pairs.candidates);
        for (auto& p : outcome.pairs.kept) written.push_back(std::move(p));
      });

  if (!written.empty()) summary.stats = Stats(written);
  return summary;
}

std::string BuildSummaryToJson(const BuildSummary& summary) {
  nlohmann::ordered_json j;
  j["titles_ok"] = summary.titles_ok;
  j["titles_failed"] = summary.titles_failed;
  j["candidate_pairs"] = summary.candidate_pairs;
  const CorpusStats stats = summary.stats.value_or(CorpusStats{});
  j["pair_count"] = summary.pairs_written;
  j["avg_dialogue_tokens"] = stats.avg_dialogue_tokens;
  j["avg_narrative_tokens"] = stats.avg_narrative_tokens;
  j["coverage_mean"] = stats.coverage_mean;
  j["density_mean"] = stats.density_mean;
  j["tokenizer"] = "lowercase, split on non-alphanumeric";
  return j.dump(2);
}

// ---------------------------------------------------------------------------

double MeasureEval::accuracy() const {
  if (total.labeled == 0) return 0.0;
  return static_cast<double>(total.correct) / static_cast<double>(total.labeled);
}

double MeasureEval::adjacency_error_rate() const {
  const std::size_t errors = total.labeled - total.correct;
  if (errors == 0) return 0.0;
  return static_cast<double>(total.adjacent_errors) / static_cast<double>(errors);
}

std::vector<MeasureEval> RunEval(std::span<const ManifestEntry> titles,
                                 const std::filesystem::path& gold_dir,
                                 std::span<const Measure> measures, const PipelineConfig& config) {
  config.Validate();
  std::vector<GoldAlignment> golds;
  for (const auto& t : titles) {
    const auto path = gold_dir / (t.id + ".json");
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
      throw Error(ErrorCode::kMissingGold, "no gold alignment for '" + t.id + "' at " + path.string());
    }
    golds.push_back(ParseGoldJson(ReadTextFile(path)));
    if (golds.back().assignment.empty()) {
      throw Error(ErrorCode::kEmptyGold, "gold alignment for '" + t.id + "' is empty");
    }
  }

  std::vector<MeasureEval> report;
  for (Measure m : measures) report.push_back({m, {}, {}});

  OrderedParallel<std::vector<AlignmentTally>>(
      titles.size(), config.workers,
      [&](std::size_t i) {
        const std::string srt = ReadTextFile(titles[i].subtitle_path);
        const std::string synopsis = ReadTextFile(titles[i].synopsis_path);
        std::vector<AlignmentTally> tallies;
        for (Measure m : measures) {
          const TitleAlignment aligned = AlignTitle(srt, synopsis, config, m);
          CheckGoldBounds(golds[i], aligned.sim.rows(), aligned.sim.cols());
          tallies.push_back(Tally(aligned.alignment, golds[i]));
        }
        return tallies;
      },
      [&](std::size_t i, std::vector<AlignmentTally>& tallies) {
        for (std::size_t k = 0; k < report.size(); ++k) {
          report[k].titles.push_back({titles[i].id, tallies[k]});
          report[k].total.labeled += tallies[k].labeled;
          report[k].total.correct += tallies[k].correct;
          report[k].total.adjacent_errors += tallies[k].adjacent_errors;
        }
      });
  return report;
}

std::string EvalReportToJson(std::span<const MeasureEval> report, const PipelineConfig& config) {
  nlohmann::ordered_json measures = nlohmann::ordered_json::array();
  for (const auto& r : report) {
    nlohmann::ordered_json per_title = nlohmann::ordered_json::array();
    for (const auto& t : r.titles) {
      const std::size_t errors = t.tally.labeled - t.tally.correct;
      per_title.push_back({
          {"id", t.id},
          {"labeled", t.tally.labeled},
          {"correct", t.tally.correct},
          {"accuracy", t.tally.labeled ? static_cast<double>(t.tally.correct) /
                                             static_cast<double>(t.tally.labeled)
                                       : 0.0},
          {"adjacency_error_rate",
           errors ? static_cast<double>(t.tally.adjacent_errors) / static_cast<double>(errors)
                  : 0.0},
      });
    }
    nlohmann::ordered_json entry;
    entry["measure"] = MeasureName(r.measure);
    entry["labeled"] = r.total.labeled;
    entry["correct"] = r.total.correct;
    entry["accuracy"] = r.accuracy();
    entry["adjacency_error_rate"] = r.adjacency_error_rate();
    entry["titles"] = std::move(per_title);
    measures.push_back(std::move(entry));
  }
  nlohmann::ordered_json out;
  out["K"] = config.max_skip;
  out["delta_t_ms"] = config.delta_t_ms;
  out["trailing_skip"] = TrailingSkipName(config.trailing);
  out["measures"] = std::move(measures);
  return out.dump(2);
}

}  // namespace diana
