#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "diana/pair_record.h"

namespace diana {

struct CorpusStats {
  std::size_t pair_count = 0;
  double avg_dialogue_tokens = 0.0;
  double avg_narrative_tokens = 0.0;
  double coverage_mean = 0.0;
  double density_mean = 0.0;
};

// Reals are written with at most 6 fractional digits, trailing zeros trimmed
// ("1.0", "0.75", "0.333333").
std::string FormatDecimal(double value);

// Throws Error{kInvariantViolation} for empty text or non-increasing ids.
void CheckPairRecord(const PairRecord& record);

// Field order: title_id, narrative_id, dialogue, narrative, dialogue_ids,
// coverage, density, align_score.
std::string ToJsonLine(const PairRecord& record);

// Returns the number of lines written. Throws Error{kIoFailure}.
std::size_t WriteJsonl(std::span<const PairRecord> pairs, std::ostream& sink);

// Blank lines are skipped. Throws Error{kParseFailure} or
// Error{kInvariantViolation} carrying the 1-based line number.
std::vector<PairRecord> ReadJsonl(std::istream& source);

// Token counts use Tokenize. Throws Error{kEmptyCorpus}.
CorpusStats Stats(std::span<const PairRecord> pairs);

// CorpusStats as JSON plus the tokenizer label.
std::string StatsToJson(const CorpusStats& stats);

}  // namespace diana
