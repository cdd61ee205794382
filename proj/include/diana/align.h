#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "diana/textsim.h"

namespace diana {

enum class TrailingSkip {
  kUnbounded,  // the last dialogue may land on any narrative
  kBounded,    // the last dialogue lands on one of the final K+1 narratives
};

std::string_view TrailingSkipName(TrailingSkip t);

inline constexpr int kDefaultSkip = 3;

// Monotone many-to-one assignment of dialogue sessions to narrative segments.
// Both sides are 0-based matrix indices: assignment[j] is the narrative row of
// dialogue column j.
struct AlignmentResult {
  std::vector<int> assignment;
  double score = 0.0;
  std::size_t narrative_count = 0;
};

// Skip-K dynamic time warping. A(i, j) = max_{0<=k<=K+1} A(i-k, j-1) + S(i, j),
// seeded with A(i, 0) = S(i, 0) for i <= K so at most K leading narratives are
// skipped. Among optimal paths the backtrace prefers the smallest k at every
// step and, at the end, the largest final row; equivalently it returns the
// optimal assignment that is greatest when compared from the last dialogue
// backwards.
//
// Throws Error{kInfeasibleAlignment} when no row can end the path, which can
// only happen with TrailingSkip::kBounded.
AlignmentResult Align(const SimilarityMatrix& sim, int max_skip,
                      TrailingSkip trailing = TrailingSkip::kUnbounded);

// Exhaustive enumeration of every admissible assignment; same tie rule as
// Align. Exponential, meant for small matrices in tests.
AlignmentResult BruteForceAlign(const SimilarityMatrix& sim, int max_skip,
                                TrailingSkip trailing = TrailingSkip::kUnbounded);

// Partial reference alignment, 0-based like AlignmentResult.
struct GoldAlignment {
  std::map<int, int> assignment;
};

// JSON object with 1-based string keys (dialogue) and integer values
// (narrative).
GoldAlignment ParseGoldJson(std::string_view text);
// Throws Error{kInvariantViolation} if an index lies outside an m x n matrix.
void CheckGoldBounds(const GoldAlignment& gold, std::size_t m, std::size_t n);

// Fraction of gold-labeled dialogues aligned to their gold narrative. Throws
// Error{kEmptyGold}.
double Accuracy(const AlignmentResult& pred, const GoldAlignment& gold);

// Among misaligned gold dialogues, the fraction that landed one narrative
// away. 0 when there are no errors.
double AdjacencyErrorRate(const AlignmentResult& pred, const GoldAlignment& gold);

struct AlignmentTally {
  std::size_t labeled = 0;
  std::size_t correct = 0;
  std::size_t adjacent_errors = 0;
};
AlignmentTally Tally(const AlignmentResult& pred, const GoldAlignment& gold);

// {"assignment": {"1": i, ...}, "score", "K", "measure"} with 1-based indices.
std::string AlignmentToJson(const AlignmentResult& result, int max_skip, Measure measure);

}  // namespace diana
