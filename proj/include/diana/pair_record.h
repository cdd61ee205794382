#pragma once

#include <string>
#include <vector>

namespace diana {

// One (dialogue, narrative) corpus entry. narrative_id and dialogue_ids are
// the 1-based segment and session ids of the source title.
struct PairRecord {
  std::string title_id;
  int narrative_id = 0;
  std::string dialogue;
  std::string narrative;
  std::vector<int> dialogue_ids;
  double coverage = 0.0;
  double density = 0.0;
  double align_score = 0.0;

  bool operator==(const PairRecord&) const = default;
};

}  // namespace diana
