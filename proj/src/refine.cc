#include "diana/refine.h"

#include <algorithm>
#include <stdexcept>

#include "diana/textsim.h"

namespace diana {

std::vector<std::vector<int>> InvertAlignment(const AlignmentResult& result) {
  std::vector<std::vector<int>> inverse(result.narrative_count);
  for (std::size_t j = 0; j < result.assignment.size(); ++j) {
    const int i = result.assignment[j];
    if (i < 0 || static_cast<std::size_t>(i) >= inverse.size()) {
      throw std::out_of_range("alignment row outside narrative range");
    }
    inverse[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
  }
  return inverse;
}

std::vector<CandidatePool> MergeNeighbors(const std::vector<std::vector<int>>& inverse) {
  std::vector<CandidatePool> pools;
  const std::size_t m = inverse.size();
  for (std::size_t i = 0; i < m; ++i) {
    CandidatePool pool{static_cast<int>(i), {}};
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min(m - 1, i + 1);
    for (std::size_t k = lo; k <= hi; ++k) {
      pool.candidates.insert(pool.candidates.end(), inverse[k].begin(), inverse[k].end());
    }
    std::sort(pool.candidates.begin(), pool.candidates.end());
    pool.candidates.erase(std::unique(pool.candidates.begin(), pool.candidates.end()),
                          pool.candidates.end());
    if (!pool.candidates.empty()) pools.push_back(std::move(pool));
  }
  return pools;
}

SelectedPair GreedySelect(std::string_view narrative, const CandidatePool& pool,
                          std::span<const DialogueSession> sessions) {
  const TokenSeq reference = Tokenize(narrative);
  SelectedPair out;
  out.narrative = pool.narrative;

  auto score_with = [&](int extra) {
    std::vector<int> trial = out.selected;
    trial.insert(std::upper_bound(trial.begin(), trial.end(), extra), extra);
    std::vector<const DialogueSession*> chosen;
    for (int j : trial) chosen.push_back(&sessions[static_cast<std::size_t>(j)]);
    return Rouge1F(Tokenize(SerializeDialogue(chosen)), reference);
  };

  while (out.selected.size() < pool.candidates.size()) {
    int best = -1;
    double best_score = out.rouge_f;
    for (int c : pool.candidates) {
      if (std::binary_search(out.selected.begin(), out.selected.end(), c)) continue;
      const double f = score_with(c);
      if (f > best_score) {
        best = c;
        best_score = f;
      }
    }
    if (best < 0) break;
    out.selected.insert(std::upper_bound(out.selected.begin(), out.selected.end(), best), best);
    out.rouge_f = best_score;
    out.trace.push_back(best_score);
  }
  return out;
}

}  // namespace diana
