#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace diana {

// One timed block of an SRT file after markup and annotation stripping.
struct SubtitleCue {
  int index = 0;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::string text;  // cleaned lines joined by a single space
  // Cleaned lines, kept so that dash-prefixed turns can be split later.
  std::vector<std::string> lines;

  bool operator==(const SubtitleCue&) const = default;
};

struct SynopsisDoc {
  std::string title;
  int year = 0;
  std::string text;
};

struct TitleMeta {
  std::string title;  // normalized
  int year = 0;
  std::set<std::string> role_names;  // normalized
};

// One synopsis sentence. Ids are 1-based in document order.
struct NarrativeSegment {
  int id = 0;
  std::string text;

  bool operator==(const NarrativeSegment&) const = default;
};

// Parses the content of one SRT file. Cues come back sorted by start time.
// Throws Error{kMalformedTimestamp} on an unparseable time line and
// Error{kEmptyFile} when nothing survives.
std::vector<SubtitleCue> ParseSrt(std::string_view raw);

std::string SerializeSrt(std::span<const SubtitleCue> cues);
std::string FormatSrtTimestamp(std::int64_t ms);

// Removes <tags>, {overrides} and [..] / (..) annotations from one line, then
// collapses whitespace.
std::string CleanCueLine(std::string_view line);

std::string NormalizeTitle(std::string_view raw);
std::string NormalizeRole(std::string_view raw);
TitleMeta MakeTitleMeta(std::string_view title, int year,
                        std::span<const std::string> roles);

// |a ∩ b| / min(|a|, |b|), or 0 when either side is empty.
double RoleNameOverlap(const std::set<std::string>& a,
                       const std::set<std::string>& b);

inline constexpr double kDefaultLinkThreshold = 0.5;

// Same normalized title, same year and role overlap strictly above
// `threshold`.
bool Link(const TitleMeta& sub, const TitleMeta& syn,
          double threshold = kDefaultLinkThreshold);

std::vector<NarrativeSegment> SplitSentences(std::string_view text);
inline std::vector<NarrativeSegment> SplitSentences(const SynopsisDoc& doc) {
  return SplitSentences(doc.text);
}

// Per-title metadata sidecar. At least one of the two paths is present; the
// paths are resolved against the sidecar's directory when relative.
struct TitleSidecar {
  std::string id;
  std::string title;
  int year = 0;
  std::vector<std::string> roles;
  std::optional<std::filesystem::path> subtitle_path;
  std::optional<std::filesystem::path> synopsis_path;

  TitleMeta meta() const { return MakeTitleMeta(title, year, roles); }
};

TitleSidecar ParseSidecar(std::string_view json_text,
                          const std::filesystem::path& base_dir = {});
// Every *.json file in `dir`, sorted by id. Throws Error{kMissingInput} if the
// directory does not exist.
std::vector<TitleSidecar> LoadSidecars(const std::filesystem::path& dir);

std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace diana
