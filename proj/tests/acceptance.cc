// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and budgets are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "json.hpp"

#include "diana/align.h"
#include "diana/error.h"
#include "diana/ingest.h"
#include "diana/pipeline.h"
#include "diana/quality.h"
#include "diana/refine.h"
#include "diana/segment.h"
#include "diana/textsim.h"
#include "support/oracles.h"
#include "support/synth.h"

using namespace diana;
using namespace diana::testing;

namespace {

constexpr double kScoreTolerance = 1e-9;
constexpr double kTraceTolerance = 1e-12;
constexpr double kFilterEpsilon = 1e-9;
constexpr double kNoisyAccuracyFloor = 0.9;
constexpr double kAlignBudgetSeconds = 5.0;
constexpr double kSynthBudgetSeconds = 10.0;
constexpr int kAlignInstances = 300;
constexpr int kSynthTitles = 20;
constexpr double kDistractorFraction = 0.3;
constexpr double kNoise = 0.2;
constexpr int kDensityInstances = 1000;
constexpr int kGreedyPools = 100;
constexpr int kMinGoldens = 5;
constexpr int kTimelines = 500;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

Outcome DpMatchesOracle() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto start = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (int t = 0; t < kAlignInstances; ++t) {
    const int m = 1 + static_cast<int>(rng() % 5);
    const int n = 1 + static_cast<int>(rng() % 5);
    const int k = static_cast<int>(rng() % 3);
    std::vector<double> values(static_cast<std::size_t>(m * n));
    for (double& v : values) v = unit(rng);
    const SimilarityMatrix sim(m, n, std::move(values), Measure::kTfIdf);
    const auto dp = Align(sim, k);
    const auto bf = BruteForceAlign(sim, k);
    if (std::abs(dp.score - bf.score) > kScoreTolerance || dp.assignment != bf.assignment) {
      ++mismatches;
    }
  }
  const double secs = Seconds(start);
  return {mismatches == 0 && secs < kAlignBudgetSeconds,
          std::to_string(kAlignInstances) + " matrices, " + std::to_string(mismatches) +
              " mismatches, " + Fmt(secs) + " s"};
}

struct SynthRun {
  std::vector<MeasureEval> evals;
  double seconds = 0.0;
};

SynthRun RunSynth(const std::string& name, double noise, std::span<const Measure> measures) {
  const auto dir = ScratchDir(name);
  SynthOptions options;
  options.distractor_fraction = kDistractorFraction;
  options.noise = noise;
  options.seed = 1000;
  const auto start = std::chrono::steady_clock::now();
  WriteSynthCorpus(dir, kSynthTitles, options);
  const auto report = LinkTitles(LoadSidecars(dir / "meta"));
  PipelineConfig config;
  config.max_skip = 3;
  SynthRun run;
  run.evals = RunEval(report.titles, dir / "gold", measures, config);
  run.seconds = Seconds(start);
  std::filesystem::remove_all(dir);
  return run;
}

double TitleAccuracy(const AlignmentTally& t) {
  return t.labeled == 0 ? 0.0 : static_cast<double>(t.correct) / static_cast<double>(t.labeled);
}

double MacroAccuracy(const MeasureEval& eval) {
  double sum = 0.0;
  for (const auto& t : eval.titles) sum += TitleAccuracy(t.tally);
  return eval.titles.empty() ? 0.0 : sum / static_cast<double>(eval.titles.size());
}

Outcome SynthAccuracy(const SynthRun& noisy) {
  const Measure measure[] = {Measure::kTfIdfNormalized};
  const SynthRun clean = RunSynth("accept-clean", 0.0, measure);
  const MeasureEval& c = clean.evals.front();
  int perfect = 0;
  for (const auto& t : c.titles) perfect += TitleAccuracy(t.tally) == 1.0 ? 1 : 0;
  const MeasureEval* n = nullptr;
  for (const auto& e : noisy.evals)
    if (e.measure == Measure::kTfIdfNormalized) n = &e;
  const double noisy_acc = MacroAccuracy(*n);
  const double secs = clean.seconds + noisy.seconds;
  const bool pass = static_cast<int>(c.titles.size()) == kSynthTitles && perfect == kSynthTitles &&
                    noisy_acc >= kNoisyAccuracyFloor && secs < kSynthBudgetSeconds;
  return {pass, "clean " + std::to_string(perfect) + "/" + std::to_string(c.titles.size()) +
                    " titles at 1.0, noisy mean " + Fmt(noisy_acc) + ", " + Fmt(secs) + " s"};
}

Outcome MeasureOrdering(const SynthRun& noisy) {
  double jac = 0, tfidf = 0, norm = 0;
  for (const auto& e : noisy.evals) {
    if (e.measure == Measure::kJaccard) jac = e.accuracy();
    if (e.measure == Measure::kTfIdf) tfidf = e.accuracy();
    if (e.measure == Measure::kTfIdfNormalized) norm = e.accuracy();
  }
  return {norm >= tfidf && tfidf >= jac, "tfidf_normalized " + Fmt(norm) + " >= tfidf " +
                                             Fmt(tfidf) + " >= jaccard " + Fmt(jac)};
}

TokenSeq RandomTokens(std::mt19937_64& rng, std::size_t len, int vocab) {
  TokenSeq out;
  for (std::size_t k = 0; k < len; ++k) out.push_back("w" + std::to_string(rng() % vocab));
  return out;
}

Outcome CoverageDensity() {
  std::mt19937_64 rng(4);
  int failures = 0;
  for (int t = 0; t < kDensityInstances; ++t) {
    const TokenSeq article = RandomTokens(rng, 1 + rng() % 30, 2 + static_cast<int>(rng() % 8));
    // Fully extractive: a contiguous slice of the article.
    const std::size_t from = rng() % article.size();
    const std::size_t len = 1 + rng() % (article.size() - from);
    const TokenSeq slice(article.begin() + static_cast<std::ptrdiff_t>(from),
                         article.begin() + static_cast<std::ptrdiff_t>(from + len));
    const auto f = ExtractiveFragments(article, slice);
    if (Coverage(f, slice.size()) != 1.0 ||
        Density(f, slice.size()) != static_cast<double>(slice.size())) {
      ++failures;
    }
    // Disjoint vocabulary.
    TokenSeq foreign;
    for (std::size_t k = 0; k < len; ++k) foreign.push_back("z" + std::to_string(k));
    const auto none = ExtractiveFragments(article, foreign);
    if (Coverage(none, foreign.size()) != 0.0 || Density(none, foreign.size()) != 0.0) ++failures;
    // Random pair.
    const TokenSeq summary = RandomTokens(rng, 1 + rng() % 30, 2 + static_cast<int>(rng() % 12));
    const auto g = ExtractiveFragments(article, summary);
    if (Density(g, summary.size()) < Coverage(g, summary.size())) ++failures;
  }
  return {failures == 0,
          std::to_string(kDensityInstances) + " instances, " + std::to_string(failures) + " failures"};
}

Outcome FilterStrictness() {
  auto record = [](double cov, double den) {
    PairRecord r;
    r.title_id = "t";
    r.narrative_id = 1;
    r.dialogue = "d";
    r.narrative = "n";
    r.dialogue_ids = {1};
    r.coverage = cov;
    r.density = den;
    return r;
  };
  const double eps = kFilterEpsilon;
  const std::vector<PairRecord> pairs = {
      record(0.5, 2.0), record(0.9, 1.0), record(0.5, 1.0),
      record(0.5 + eps, 1.0 + eps), record(0.5 + eps, 2.0), record(0.9, 1.0 + eps)};
  const auto kept = FilterPairs(pairs, 0.5, 1.0);
  const bool pass = kept.size() == 3 && kept[0] == pairs[3] && kept[1] == pairs[4] &&
                    kept[2] == pairs[5] && !PassesFilter({0.5, 1.0}) &&
                    PassesFilter({0.5 + eps, 1.0 + eps});
  return {pass, "kept " + std::to_string(kept.size()) + " of 6 boundary pairs"};
}

Outcome GreedySelection() {
  std::mt19937_64 rng(6);
  int failures = 0;
  for (int t = 0; t < kGreedyPools; ++t) {
    const int count = 1 + static_cast<int>(rng() % 8);
    const int vocab = 4 + static_cast<int>(rng() % 10);
    std::vector<DialogueSession> sessions;
    for (int s = 0; s < count; ++s) {
      std::string text;
      for (const auto& tok : RandomTokens(rng, 1 + rng() % 6, vocab)) text += tok + " ";
      sessions.push_back({s + 1, {{text, 0, 1, std::nullopt}}});
    }
    std::vector<int> pool;
    for (int s = 0; s < count; ++s)
      if (pool.size() < 6 && rng() % 3 != 0) pool.push_back(s);
    if (pool.empty()) pool.push_back(0);
    std::string narrative;
    for (const auto& tok : RandomTokens(rng, 2 + rng() % 10, vocab)) narrative += tok + " ";

    const auto pick = GreedySelect(narrative, {0, pool}, sessions);
    const auto oracle =
        SimulateGreedy(pool, SubsetScores(pool, sessions, Tokenize(narrative)));
    bool ok = pick.selected == oracle.selected && pick.trace.size() == oracle.scores.size() &&
              pick.trace.size() <= pool.size();
    for (std::size_t r = 0; ok && r < pick.trace.size(); ++r) {
      ok = std::abs(pick.trace[r] - oracle.scores[r]) <= kTraceTolerance &&
           (r == 0 ? pick.trace[r] > 0.0 : pick.trace[r] > pick.trace[r - 1]);
    }
    if (!ok) ++failures;
  }

  // narrative "alice leaves bob"; F(c1) = 4/5, F(c2) = 2/5, F(c1 + c2) = 6/7.
  const std::vector<DialogueSession> two = {{1, {{"alice leaves", 0, 1, std::nullopt}}},
                                            {2, {{"bob sleeps", 2, 3, std::nullopt}}}};
  const auto worked = GreedySelect("alice leaves bob", {0, {0, 1}}, two);
  const bool worked_ok = worked.selected == std::vector<int>{0, 1} && worked.trace.size() == 2 &&
                         std::abs(worked.trace[0] - 0.8) <= kTraceTolerance &&
                         std::abs(worked.trace[1] - 6.0 / 7.0) <= kTraceTolerance;
  return {failures == 0 && worked_ok, std::to_string(kGreedyPools) + " pools, " +
                                          std::to_string(failures) + " failures, worked example " +
                                          (worked_ok ? "ok" : "wrong")};
}

Outcome ParserGoldens() {
  const std::filesystem::path dir = std::filesystem::path(DIANA_TEST_DATA) / "srt";
  int checked = 0, failed = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".srt") continue;
    auto expected_path = entry.path();
    expected_path.replace_extension(".expected.json");
    const auto expected = nlohmann::json::parse(ReadTextFile(expected_path));
    ++checked;
    try {
      const auto cues = ParseSrt(ReadTextFile(entry.path()));
      nlohmann::json got_cues = nlohmann::json::array();
      for (const auto& c : cues) {
        got_cues.push_back({{"index", c.index}, {"start_ms", c.start_ms}, {"end_ms", c.end_ms},
                            {"text", c.text}, {"lines", c.lines}});
      }
      nlohmann::json got_utts = nlohmann::json::array();
      for (const auto& u : CuesToUtterances(cues)) {
        nlohmann::json j = {{"text", u.text}, {"start_ms", u.start_ms}, {"end_ms", u.end_ms}};
        if (u.speaker) j["speaker"] = *u.speaker;
        got_utts.push_back(j);
      }
      if (got_cues != expected["cues"] || got_utts != expected["utterances"]) ++failed;
    } catch (const std::exception&) {
      ++failed;
    }
  }
  return {checked >= kMinGoldens && failed == 0,
          std::to_string(checked) + " golden files, " + std::to_string(failed) + " mismatches"};
}

std::string BuildCorpus(std::span<const ManifestEntry> titles, int workers) {
  PipelineConfig config;
  config.workers = workers;
  std::ostringstream sink;
  RunBuild(titles, config, sink);
  return sink.str();
}

Outcome Determinism() {
  const auto dir = ScratchDir("accept-determinism");
  SynthOptions options;
  options.noise = 0.1;
  options.seed = 500;
  WriteSynthCorpus(dir, 8, options);
  const auto report = LinkTitles(LoadSidecars(dir / "meta"));
  const std::string first = BuildCorpus(report.titles, 1);
  const std::string second = BuildCorpus(report.titles, 1);
  const std::string parallel = BuildCorpus(report.titles, 8);
  std::filesystem::remove_all(dir);
  const bool pass = !first.empty() && first == second && first == parallel;
  return {pass, std::to_string(first.size()) + " bytes, runs " +
                    (first == second ? "identical" : "differ") + ", workers 1 vs 8 " +
                    (first == parallel ? "identical" : "differ")};
}

Outcome SegmentationProperties() {
  std::mt19937_64 rng(9);
  int failures = 0;
  for (int t = 0; t < kTimelines; ++t) {
    std::vector<Utterance> utts;
    std::int64_t clock = 0;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int k = 0; k < n; ++k) {
      clock += static_cast<std::int64_t>(rng() % 15000);
      const std::int64_t end = clock + static_cast<std::int64_t>(rng() % 4000);
      utts.push_back({"u" + std::to_string(k), clock, end, std::nullopt});
      clock = end;
    }
    const std::int64_t delta = 1 + static_cast<std::int64_t>(rng() % 12000);
    const auto sessions = SplitSessions(utts, delta);
    bool ok = true;
    std::vector<Utterance> flat;
    for (const auto& s : sessions) {
      ok = ok && !s.utterances.empty();
      for (std::size_t k = 1; k < s.utterances.size(); ++k)
        ok = ok && s.utterances[k].start_ms - s.utterances[k - 1].end_ms <= delta;
      flat.insert(flat.end(), s.utterances.begin(), s.utterances.end());
    }
    ok = ok && flat == utts;
    for (std::size_t k = 1; k < sessions.size(); ++k)
      ok = ok && sessions[k].utterances.front().start_ms -
                         sessions[k - 1].utterances.back().end_ms >
                     delta;
    const std::int64_t larger = delta + 1 + static_cast<std::int64_t>(rng() % 5000);
    ok = ok && SplitSessions(utts, larger).size() <= sessions.size();
    if (!ok) ++failures;
  }
  return {failures == 0,
          std::to_string(kTimelines) + " timelines, " + std::to_string(failures) + " failures"};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::off);
  const Measure noisy_measures[] = {Measure::kJaccard, Measure::kTfIdf, Measure::kTfIdfNormalized};
  const SynthRun noisy = RunSynth("accept-noisy", kNoise, noisy_measures);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"dp matches brute force", DpMatchesOracle},
      {"synthetic alignment accuracy", [&] { return SynthAccuracy(noisy); }},
      {"measure ordering on noisy titles", [&] { return MeasureOrdering(noisy); }},
      {"coverage and density identities", CoverageDensity},
      {"filter strictness", FilterStrictness},
      {"greedy selection", GreedySelection},
      {"srt parser goldens", ParserGoldens},
      {"build determinism", Determinism},
      {"segmentation properties", SegmentationProperties},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", k + 1,
                criteria[k].first.c_str(), o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
