#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "diana/align.h"
#include "diana/corpus.h"
#include "diana/ingest.h"
#include "diana/quality.h"
#include "diana/segment.h"
#include "diana/textsim.h"

namespace diana {

struct PipelineConfig {
  std::int64_t delta_t_ms = kDefaultDeltaTMs;
  int max_skip = kDefaultSkip;
  Measure measure = Measure::kTfIdfNormalized;
  double cov_min = kDefaultCoverageMin;
  double den_min = kDefaultDensityMin;
  double link_threshold = kDefaultLinkThreshold;
  TrailingSkip trailing = TrailingSkip::kUnbounded;
  int workers = 1;

  // Throws Error{kInvalidConfig}.
  void Validate() const;
};

// Keys: delta_t_ms, K, measure, cov_min, den_min, link_threshold,
// trailing_skip, workers. Missing keys keep the values from `base`; unknown
// keys are rejected.
PipelineConfig ConfigFromJson(std::string_view text, PipelineConfig base = {});
std::string ConfigToJson(const PipelineConfig& config);

// ---------------------------------------------------------------------------
// Linking

struct ManifestEntry {
  std::string id;
  std::string title;
  int year = 0;
  std::filesystem::path subtitle_path;
  std::filesystem::path synopsis_path;
  double role_overlap = 0.0;

  bool operator==(const ManifestEntry&) const = default;
};

struct SkippedTitle {
  std::string id;
  std::string reason;

  bool operator==(const SkippedTitle&) const = default;
};

struct LinkReport {
  std::vector<ManifestEntry> titles;
  std::vector<SkippedTitle> skipped;
  std::vector<std::string> warnings;
};

// Pairs every subtitle-side sidecar with a synopsis-side sidecar that passes
// Link(). A sidecar naming both files prefers its own synopsis; otherwise
// candidates are taken first-by-id, each synopsis at most once, and a
// collision warning is recorded when several qualify.
LinkReport LinkTitles(std::span<const TitleSidecar> sidecars,
                      double threshold = kDefaultLinkThreshold);

std::string ManifestToJson(const LinkReport& report);
LinkReport ParseManifest(std::string_view text);

// ---------------------------------------------------------------------------
// Per-title pipeline

struct TitleAlignment {
  std::vector<NarrativeSegment> segments;
  std::vector<DialogueSession> sessions;
  SimilarityMatrix sim;
  AlignmentResult alignment;
};

// parse -> segment -> similarity -> align.
TitleAlignment AlignTitle(std::string_view srt, std::string_view synopsis,
                          const PipelineConfig& config, Measure measure);
inline TitleAlignment AlignTitle(std::string_view srt, std::string_view synopsis,
                                 const PipelineConfig& config) {
  return AlignTitle(srt, synopsis, config, config.measure);
}

struct TitlePairs {
  std::vector<PairRecord> kept;
  std::size_t candidates = 0;  // non-empty selections before filtering
};

// invert -> merge neighbors -> greedy select -> coverage/density filter.
// align_score of a pair is the mean similarity between the narrative and its
// selected sessions.
TitlePairs BuildPairs(const std::string& title_id, const TitleAlignment& aligned,
                      const PipelineConfig& config);

struct TitleOutcome {
  std::string id;
  TitlePairs pairs;
  std::optional<std::string> error;
};

// Reads both files and runs the whole per-title pipeline; failures are
// captured in `error` rather than thrown.
TitleOutcome BuildTitle(const ManifestEntry& entry, const PipelineConfig& config);

struct BuildSummary {
  std::size_t titles_ok = 0;
  std::size_t titles_failed = 0;
  std::size_t candidate_pairs = 0;
  std::size_t pairs_written = 0;
  std::optional<CorpusStats> stats;  // absent when no pair was written
};

// Processes titles on `config.workers` threads and writes their pairs to
// `sink` in manifest order.
BuildSummary RunBuild(std::span<const ManifestEntry> titles, const PipelineConfig& config,
                      std::ostream& sink);

std::string BuildSummaryToJson(const BuildSummary& summary);

// ---------------------------------------------------------------------------
// Evaluation against gold alignments

struct TitleEval {
  std::string id;
  AlignmentTally tally;
};

struct MeasureEval {
  Measure measure = Measure::kTfIdfNormalized;
  AlignmentTally total;
  std::vector<TitleEval> titles;

  // Micro-averaged over all gold-labeled dialogues.
  double accuracy() const;
  double adjacency_error_rate() const;
};

// Gold for title `id` is read from `<gold_dir>/<id>.json`. Throws
// Error{kMissingGold} when a file is absent.
std::vector<MeasureEval> RunEval(std::span<const ManifestEntry> titles,
                                 const std::filesystem::path& gold_dir,
                                 std::span<const Measure> measures, const PipelineConfig& config);

std::string EvalReportToJson(std::span<const MeasureEval> report, const PipelineConfig& config);

// ---------------------------------------------------------------------------

// Runs produce(i) for i in [0, count) on `workers` threads and hands each
// result to consume(i, result) on the calling thread, strictly in index order.
// An exception thrown by produce(i) is rethrown on the calling thread when
// slot i comes up.
template <typename T>
void OrderedParallel(std::size_t count, int workers, const std::function<T(std::size_t)>& produce,
                     const std::function<void(std::size_t, T&)>& consume) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      T value = produce(i);
      consume(i, value);
    }
    return;
  }
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> failures(count);
  std::vector<char> done(count, 0);
  std::mutex mu;
  std::condition_variable ready;
  std::size_t next_task = 0;

  auto work = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (next_task == count) return;
        i = next_task++;
      }
      std::optional<T> value;
      std::exception_ptr failure;
      try {
        value.emplace(produce(i));
      } catch (...) {
        failure = std::current_exception();
      }
      {
        std::lock_guard lock(mu);
        slots[i] = std::move(value);
        failures[i] = failure;
        done[i] = 1;
      }
      ready.notify_all();
    }
  };

  std::vector<std::jthread> pool;
  const auto n = static_cast<std::size_t>(workers) < count ? static_cast<std::size_t>(workers)
                                                             : count;
  for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work);

  for (std::size_t i = 0; i < count; ++i) {
    std::optional<T> value;
    std::exception_ptr failure;
    {
      std::unique_lock lock(mu);
      ready.wait(lock, [&] { return done[i] != 0; });
      value.swap(slots[i]);
      failure = failures[i];
    }
    if (failure) {
      {
        std::lock_guard lock(mu);
        next_task = count;
      }
      std::rethrow_exception(failure);
    }
    consume(i, *value);
  }
}

}  // namespace diana
