#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "diana/pair_record.h"
#include "diana/textsim.h"

namespace diana {

// A run of summary tokens copied verbatim from the article.
struct Fragment {
  std::size_t summary_start = 0;
  std::size_t article_start = 0;
  std::size_t length = 0;

  bool operator==(const Fragment&) const = default;
};

struct QualityScores {
  double coverage = 0.0;
  double density = 0.0;
};

inline constexpr double kDefaultCoverageMin = 0.5;
inline constexpr double kDefaultDensityMin = 1.0;

// Greedy left-to-right scan of the summary: at each position take the longest
// match anywhere in the article (leftmost article start among the longest),
// then jump past it.
std::vector<Fragment> ExtractiveFragments(const TokenSeq& article, const TokenSeq& summary);

// Both throw Error{kZeroLengthSummary} when summary_len is 0.
double Coverage(std::span<const Fragment> fragments, std::size_t summary_len);
double Density(std::span<const Fragment> fragments, std::size_t summary_len);

// Article = dialogue tokens, summary = narrative tokens.
QualityScores ScorePair(std::string_view dialogue, std::string_view narrative);

bool PassesFilter(const QualityScores& scores, double cov_min = kDefaultCoverageMin,
                  double den_min = kDefaultDensityMin);

// Keeps pairs with coverage > cov_min and density > den_min, in input order.
std::vector<PairRecord> FilterPairs(std::span<const PairRecord> pairs,
                                    double cov_min = kDefaultCoverageMin,
                                    double den_min = kDefaultDensityMin);

}  // namespace diana
