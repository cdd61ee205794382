#include "diana/segment.h"

#include <stdexcept>

#include "diana/utf8.h"

namespace diana {

namespace {

// Length of a leading turn dash ("- ", "-X", "— ", "– "), or 0.
std::size_t DashPrefix(std::string_view line) {
  if (line.starts_with("- ")) return 2;
  if (line.size() >= 2 && line[0] == '-' && line[1] != '-' && line[1] != ' ' &&
      !(line[1] >= '0' && line[1] <= '9')) {
    return 1;
  }
  for (std::string_view dash : {"\xE2\x80\x94", "\xE2\x80\x93"}) {
    if (line.starts_with(dash)) return dash.size() + (line.substr(dash.size()).starts_with(" ") ? 1 : 0);
  }
  return 0;
}

// "NAME: text" with an uppercase name of at most 30 bytes.
void ExtractSpeaker(Utterance& u) {
  const auto colon = u.text.find(':');
  if (colon == std::string::npos || colon == 0 || colon > 30) return;
  const std::string_view name = utf8::Trim(std::string_view(u.text).substr(0, colon));
  bool has_letter = false;
  for (char c : name) {
    if (c >= 'A' && c <= 'Z') {
      has_letter = true;
    } else if (!(c == ' ' || c == '.' || c == '\'' || c == '-' || (c >= '0' && c <= '9'))) {
      return;
    }
  }
  if (!has_letter) return;
  const std::string_view rest = utf8::Trim(std::string_view(u.text).substr(colon + 1));
  if (rest.empty()) return;
  u.speaker = utf8::Lowercase(name);
  u.text = std::string(rest);
}

}  // namespace

std::vector<Utterance> CuesToUtterances(std::span<const SubtitleCue> cues) {
  std::vector<Utterance> out;
  for (const auto& cue : cues) {
    std::vector<std::string> lines = cue.lines;
    if (lines.empty() && !cue.text.empty()) lines.push_back(cue.text);

    int dashed = 0;
    for (const auto& l : lines) dashed += DashPrefix(l) > 0;

    std::vector<std::string> turns;
    if (dashed >= 2) {
      for (const auto& l : lines) {
        const std::size_t n = DashPrefix(l);
        if (n > 0 || turns.empty()) {
          turns.emplace_back(utf8::Trim(std::string_view(l).substr(n)));
        } else {
          turns.back() += " " + l;
        }
      }
    } else {
      std::string joined;
      for (const auto& l : lines) {
        if (!joined.empty()) joined.push_back(' ');
        joined += l;
      }
      turns.emplace_back(utf8::Trim(std::string_view(joined).substr(DashPrefix(joined))));
    }

    for (auto& t : turns) {
      Utterance u;
      u.text = utf8::CollapseWhitespace(t);
      u.start_ms = cue.start_ms;
      u.end_ms = cue.end_ms;
      ExtractSpeaker(u);
      if (!u.text.empty()) out.push_back(std::move(u));
    }
  }
  return out;
}

std::vector<DialogueSession> SplitSessions(std::span<const Utterance> utts,
                                           std::int64_t delta_t_ms) {
  if (delta_t_ms <= 0) throw std::invalid_argument("delta_t_ms must be positive");
  std::vector<DialogueSession> sessions;
  for (std::size_t t = 0; t < utts.size(); ++t) {
    if (t == 0 || utts[t].start_ms - utts[t - 1].end_ms > delta_t_ms) {
      sessions.push_back({static_cast<int>(sessions.size()) + 1, {}});
    }
    sessions.back().utterances.push_back(utts[t]);
  }
  return sessions;
}

std::string SessionPlainText(const DialogueSession& session) {
  std::string out;
  for (const auto& u : session.utterances) {
    if (!out.empty()) out.push_back(' ');
    out += u.text;
  }
  return out;
}

std::string SerializeDialogue(std::span<const DialogueSession* const> sessions) {
  std::string out;
  for (const DialogueSession* s : sessions) {
    for (const auto& u : s->utterances) {
      if (!out.empty()) out.push_back('\n');
      if (u.speaker) out += *u.speaker + ": ";
      out += u.text;
    }
  }
  return out;
}

std::string SerializeDialogue(const DialogueSession& session) {
  const DialogueSession* one[] = {&session};
  return SerializeDialogue(std::span<const DialogueSession* const>(one));
}

}  // namespace diana
