#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "diana/align.h"
#include "diana/segment.h"

namespace diana {

// Candidate dialogues for one narrative. Indices are 0-based like the
// alignment; candidates ascending and unique.
struct CandidatePool {
  int narrative = 0;
  std::vector<int> candidates;

  bool operator==(const CandidatePool&) const = default;
};

struct SelectedPair {
  int narrative = 0;
  std::vector<int> selected;  // ascending
  double rouge_f = 0.0;
  std::vector<double> trace;  // score after each accepted round
};

// For every narrative row, the ascending dialogue columns assigned to it.
std::vector<std::vector<int>> InvertAlignment(const AlignmentResult& result);

// pool(i) = inv(i-1) ∪ inv(i) ∪ inv(i+1). Empty pools are dropped.
std::vector<CandidatePool> MergeNeighbors(const std::vector<std::vector<int>>& inverse);

// Grows the selection one dialogue at a time, always taking the candidate
// whose addition gives the highest ROUGE-1 F against the narrative (smallest
// index on ties), and stops as soon as the best addition does not strictly
// improve the score. Candidate text is the corpus serialization of the
// selection in temporal order.
SelectedPair GreedySelect(std::string_view narrative, const CandidatePool& pool,
                          std::span<const DialogueSession> sessions);

}  // namespace diana
