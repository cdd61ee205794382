#include "diana/quality.h"

#include "diana/error.h"

namespace diana {

std::vector<Fragment> ExtractiveFragments(const TokenSeq& article, const TokenSeq& summary) {
  std::vector<Fragment> fragments;
  std::size_t p = 0;
  while (p < summary.size()) {
    std::size_t best_len = 0;
    std::size_t best_q = 0;
    for (std::size_t q = 0; q < article.size(); ++q) {
      std::size_t len = 0;
      while (p + len < summary.size() && q + len < article.size() &&
             summary[p + len] == article[q + len]) {
        ++len;
      }
      if (len > best_len) {
        best_len = len;
        best_q = q;
      }
    }
    if (best_len == 0) {
      ++p;
      continue;
    }
    fragments.push_back({p, best_q, best_len});
    p += best_len;
  }
  return fragments;
}

double Coverage(std::span<const Fragment> fragments, std::size_t summary_len) {
  if (summary_len == 0) throw Error(ErrorCode::kZeroLengthSummary, "coverage of an empty summary");
  std::size_t total = 0;
  for (const auto& f : fragments) total += f.length;
  return static_cast<double>(total) / static_cast<double>(summary_len);
}

double Density(std::span<const Fragment> fragments, std::size_t summary_len) {
  if (summary_len == 0) throw Error(ErrorCode::kZeroLengthSummary, "density of an empty summary");
  double total = 0.0;
  for (const auto& f : fragments) {
    total += static_cast<double>(f.length) * static_cast<double>(f.length);
  }
  return total / static_cast<double>(summary_len);
}

QualityScores ScorePair(std::string_view dialogue, std::string_view narrative) {
  const TokenSeq article = Tokenize(dialogue);
  const TokenSeq summary = Tokenize(narrative);
  const auto fragments = ExtractiveFragments(article, summary);
  return {Coverage(fragments, summary.size()), Density(fragments, summary.size())};
}

bool PassesFilter(const QualityScores& scores, double cov_min, double den_min) {
  return scores.coverage > cov_min && scores.density > den_min;
}

std::vector<PairRecord> FilterPairs(std::span<const PairRecord> pairs, double cov_min,
                                    double den_min) {
  std::vector<PairRecord> kept;
  for (const auto& p : pairs) {
    if (PassesFilter({p.coverage, p.density}, cov_min, den_min)) kept.push_back(p);
  }
  return kept;
}

}  // namespace diana
