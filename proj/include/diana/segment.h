#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diana/ingest.h"

namespace diana {

struct Utterance {
  std::string text;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::optional<std::string> speaker;  // lowercased

  bool operator==(const Utterance&) const = default;
};

// A maximal run of utterances whose end-to-start gaps stay within delta_t.
struct DialogueSession {
  int id = 0;  // 1-based, temporal order
  std::vector<Utterance> utterances;
};

inline constexpr std::int64_t kDefaultDeltaTMs = 5000;

// One utterance per cue, except cues carrying two or more dash-prefixed lines,
// which yield one utterance per dash turn. An uppercase "NAME:" prefix becomes
// the speaker.
std::vector<Utterance> CuesToUtterances(std::span<const SubtitleCue> cues);

// Starts a new session whenever start(next) - end(prev) > delta_t_ms.
std::vector<DialogueSession> SplitSessions(std::span<const Utterance> utts,
                                           std::int64_t delta_t_ms = kDefaultDeltaTMs);

// Utterance texts joined by spaces. This is the document a session
// contributes to similarity scoring.
std::string SessionPlainText(const DialogueSession& session);

// Corpus serialization: one utterance per line, "speaker: " prefix when the
// speaker is known.
std::string SerializeDialogue(std::span<const DialogueSession* const> sessions);
std::string SerializeDialogue(const DialogueSession& session);

}  // namespace diana
