#include "diana/ingest.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "diana/error.h"
#include "diana/utf8.h"
#include "json.hpp"

namespace diana {

namespace {

struct RawLine {
  std::string_view text;
  int number = 0;  // 1-based
};

std::vector<RawLine> SplitLines(std::string_view text) {
  std::vector<RawLine> lines;
  std::size_t pos = 0;
  int number = 1;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({line, number++});
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

bool IsAllDigits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Parses "H+:MM:SS,mmm" (',' or '.' before the milliseconds) at the front of
// `s`, consuming it.
std::optional<std::int64_t> ParseClock(std::string_view& s) {
  s = utf8::Trim(s);
  auto take_number = [&s](std::size_t min_digits, std::size_t max_digits,
                          std::int64_t& value) -> std::size_t {
    std::size_t n = 0;
    value = 0;
    while (n < s.size() && n < max_digits && s[n] >= '0' && s[n] <= '9') {
      value = value * 10 + (s[n] - '0');
      ++n;
    }
    if (n < min_digits) return 0;
    s.remove_prefix(n);
    return n;
  };
  std::int64_t hours = 0, minutes = 0, seconds = 0, millis = 0;
  if (!take_number(1, 4, hours) || s.empty() || s.front() != ':') return std::nullopt;
  s.remove_prefix(1);
  if (!take_number(1, 2, minutes) || s.empty() || s.front() != ':') return std::nullopt;
  s.remove_prefix(1);
  if (!take_number(1, 2, seconds)) return std::nullopt;
  if (minutes >= 60 || seconds >= 60) return std::nullopt;
  if (!s.empty() && (s.front() == ',' || s.front() == '.')) {
    s.remove_prefix(1);
    const std::size_t digits = take_number(1, 3, millis);
    if (!digits) return std::nullopt;
    for (std::size_t d = digits; d < 3; ++d) millis *= 10;
  }
  return ((hours * 60 + minutes) * 60 + seconds) * 1000 + millis;
}

bool ParseTimeLine(std::string_view line, std::int64_t& start, std::int64_t& end) {
  const auto arrow = line.find("-->");
  if (arrow == std::string_view::npos) return false;
  std::string_view left = line.substr(0, arrow);
  std::string_view right = line.substr(arrow + 3);
  auto s = ParseClock(left);
  if (!s || !utf8::Trim(left).empty()) return false;
  auto e = ParseClock(right);
  // Anything after the end clock (e.g. "X1:... Y1:...") must be separated by
  // whitespace.
  if (!e || (!right.empty() && right.front() != ' ' && right.front() != '\t')) return false;
  start = *s;
  end = *e;
  return true;
}

bool IsDashOnly(std::string_view line) {
  return line == "-" || line == "\xE2\x80\x94" || line == "\xE2\x80\x93";
}

// Removes balanced spans between `open` and `close`. Unbalanced delimiters
// stay in the text.
std::string RemoveSpans(std::string_view text, char open, char close) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == open) {
      int depth = 0;
      std::size_t scan = pos;
      for (; scan < text.size(); ++scan) {
        if (text[scan] == open) ++depth;
        if (text[scan] == close && --depth == 0) break;
      }
      if (scan < text.size()) {
        out.push_back(' ');
        pos = scan + 1;
        continue;
      }
    }
    out.push_back(text[pos++]);
  }
  return out;
}

std::string RemoveTags(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == '<' || c == '{') {
      const char close = c == '<' ? '>' : '}';
      const auto end = text.find(close, pos + 1);
      if (end != std::string_view::npos) {
        pos = end + 1;
        continue;
      }
    }
    out.push_back(c);
    ++pos;
  }
  return out;
}

}  // namespace

std::string CleanCueLine(std::string_view line) {
  std::string text = RemoveTags(line);
  text = RemoveSpans(text, '[', ']');
  text = RemoveSpans(text, '(', ')');
  return utf8::CollapseWhitespace(text);
}

std::vector<SubtitleCue> ParseSrt(std::string_view raw) {
  if (raw.substr(0, 3) == "\xEF\xBB\xBF") raw.remove_prefix(3);
  const std::vector<RawLine> lines = SplitLines(raw);

  std::vector<SubtitleCue> cues;
  int blocks = 0;
  int last_index = 0;
  std::size_t at = 0;
  auto blank = [&](std::size_t k) { return utf8::Trim(lines[k].text).empty(); };

  while (at < lines.size()) {
    if (blank(at)) {
      ++at;
      continue;
    }
    std::string_view head = utf8::Trim(lines[at].text);
    int index = last_index + 1;
    std::size_t time_at = at;
    if (IsAllDigits(head)) {
      index = std::stoi(std::string(head.substr(0, 9)));
      time_at = at + 1;
    } else if (head.find("-->") == std::string_view::npos) {
      // Text separated from its cue by a stray blank line.
      if (cues.empty() && blocks == 0) {
        throw Error(ErrorCode::kMalformedTimestamp,
                    "expected cue index or time line, got '" + std::string(head) + "'",
                    lines[at].number);
      }
      for (; at < lines.size() && !blank(at); ++at) {
        std::string cleaned = CleanCueLine(lines[at].text);
        if (cleaned.empty() || IsDashOnly(cleaned) || cues.empty()) continue;
        cues.back().lines.push_back(cleaned);
        cues.back().text += " " + cleaned;
      }
      continue;
    }

    std::int64_t start = 0, end = 0;
    if (time_at >= lines.size() || !ParseTimeLine(lines[time_at].text, start, end) ||
        start > end) {
      const int number = time_at < lines.size() ? lines[time_at].number : lines.back().number;
      throw Error(ErrorCode::kMalformedTimestamp,
                  "cue " + std::to_string(index) + ": unparseable time line", number);
    }
    ++blocks;
    last_index = index;

    SubtitleCue cue;
    cue.index = index;
    cue.start_ms = start;
    cue.end_ms = end;
    at = time_at + 1;
    for (; at < lines.size() && !blank(at); ++at) {
      std::string cleaned = CleanCueLine(lines[at].text);
      if (cleaned.empty() || IsDashOnly(cleaned)) continue;
      cue.lines.push_back(std::move(cleaned));
    }
    if (cue.lines.empty()) continue;
    for (const auto& l : cue.lines) {
      if (!cue.text.empty()) cue.text.push_back(' ');
      cue.text += l;
    }
    cues.push_back(std::move(cue));
  }

  if (cues.empty()) throw Error(ErrorCode::kEmptyFile, "no subtitle cues parsed");
  std::stable_sort(cues.begin(), cues.end(), [](const SubtitleCue& a, const SubtitleCue& b) {
    return a.start_ms < b.start_ms;
  });
  return cues;
}

std::string FormatSrtTimestamp(std::int64_t ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld,%03lld",
                static_cast<long long>(ms / 3600000), static_cast<long long>(ms / 60000 % 60),
                static_cast<long long>(ms / 1000 % 60), static_cast<long long>(ms % 1000));
  return buf;
}

std::string SerializeSrt(std::span<const SubtitleCue> cues) {
  std::string out;
  for (const auto& cue : cues) {
    out += std::to_string(cue.index);
    out += '\n';
    out += FormatSrtTimestamp(cue.start_ms) + " --> " + FormatSrtTimestamp(cue.end_ms);
    out += '\n';
    for (const auto& line : cue.lines) {
      out += line;
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::string NormalizeTitle(std::string_view raw) {
  std::string stripped;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    const char32_t cp = utf8::Next(raw, pos);
    if (utf8::IsSpace(cp)) {
      stripped.push_back(' ');
    } else if (utf8::IsWordChar(cp)) {
      utf8::Append(utf8::ToLower(cp), stripped);
    }
  }
  std::string collapsed = utf8::CollapseWhitespace(stripped);
  for (std::string_view article : {"the ", "a ", "an "}) {
    if (collapsed.size() > article.size() && collapsed.starts_with(article)) {
      collapsed.erase(0, article.size());
      break;
    }
  }
  return collapsed;
}

std::string NormalizeRole(std::string_view raw) {
  return utf8::CollapseWhitespace(utf8::Lowercase(raw));
}

TitleMeta MakeTitleMeta(std::string_view title, int year, std::span<const std::string> roles) {
  TitleMeta meta;
  meta.title = NormalizeTitle(title);
  meta.year = year;
  for (const auto& r : roles) {
    std::string name = NormalizeRole(r);
    if (!name.empty()) meta.role_names.insert(std::move(name));
  }
  return meta;
}

double RoleNameOverlap(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& name : a) common += b.count(name);
  return static_cast<double>(common) / static_cast<double>(std::min(a.size(), b.size()));
}

bool Link(const TitleMeta& sub, const TitleMeta& syn, double threshold) {
  return sub.title == syn.title && sub.year == syn.year &&
         RoleNameOverlap(sub.role_names, syn.role_names) > threshold;
}

namespace {

bool IsTerminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool IsAbbreviation(std::string_view text, std::size_t dot) {
  static const std::set<std::string, std::less<>> kAbbreviations = {
      "mr", "mrs", "ms", "dr", "st", "jr", "sr", "vs", "etc", "e.g", "i.e"};
  std::size_t begin = dot;
  while (begin > 0 && text[begin - 1] != ' ' && text[begin - 1] != '\t' &&
         text[begin - 1] != '\n' && text[begin - 1] != '\r') {
    --begin;
  }
  std::string word = utf8::Lowercase(text.substr(begin, dot - begin));
  const auto first = word.find_first_not_of("\"'([");
  if (first == std::string::npos) return false;
  return kAbbreviations.contains(std::string_view(word).substr(first));
}

// Length of a closing quote or bracket at `pos`, or 0.
std::size_t ClosingMark(std::string_view text, std::size_t pos) {
  const char c = text[pos];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  // ’ and ” in UTF-8.
  if (text.substr(pos, 3) == "\xE2\x80\x99" || text.substr(pos, 3) == "\xE2\x80\x9D") return 3;
  return 0;
}

std::size_t OpeningMark(std::string_view text, std::size_t pos) {
  const char c = text[pos];
  if (c == '"' || c == '\'' || c == '(' || c == '[') return 1;
  if (text.substr(pos, 3) == "\xE2\x80\x98" || text.substr(pos, 3) == "\xE2\x80\x9C") return 3;
  return 0;
}

}  // namespace

std::vector<NarrativeSegment> SplitSentences(std::string_view text) {
  std::vector<NarrativeSegment> segments;
  auto emit = [&](std::size_t begin, std::size_t end) {
    std::string_view piece = utf8::Trim(text.substr(begin, end - begin));
    if (!piece.empty()) {
      segments.push_back({static_cast<int>(segments.size()) + 1, std::string(piece)});
    }
  };

  std::size_t start = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (!IsTerminator(text[pos])) {
      ++pos;
      continue;
    }
    const std::size_t mark = pos;
    std::size_t end = pos + 1;
    while (end < text.size() && IsTerminator(text[end])) ++end;
    while (end < text.size()) {
      const std::size_t n = ClosingMark(text, end);
      if (!n) break;
      end += n;
    }

    bool boundary = false;
    if (end == text.size()) {
      boundary = true;
    } else if (text[end] == ' ' || text[end] == '\t' || text[end] == '\n' || text[end] == '\r') {
      std::size_t next = end;
      while (next < text.size() && utf8::IsSpace(static_cast<unsigned char>(text[next]))) ++next;
      if (next == text.size()) {
        boundary = true;
      } else {
        if (const std::size_t n = OpeningMark(text, next); n && next + n < text.size()) next += n;
        std::size_t probe = next;
        boundary = utf8::IsUpper(utf8::Next(text, probe));
      }
    }
    if (boundary && text[mark] == '.' && IsAbbreviation(text, mark)) boundary = false;
    if (boundary) {
      emit(start, end);
      start = end;
    }
    pos = end;
  }
  emit(start, text.size());
  return segments;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kMissingInput, "no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "read failed: " + path.string());
  return buf.str();
}

TitleSidecar ParseSidecar(std::string_view json_text, const std::filesystem::path& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseFailure, std::string("sidecar: ") + e.what());
  }
  TitleSidecar sc;
  try {
    sc.id = j.at("id").get<std::string>();
    sc.title = j.at("title").get<std::string>();
    sc.year = j.at("year").get<int>();
    sc.roles = j.value("roles", std::vector<std::string>{});
    auto resolve = [&](const char* key) -> std::optional<std::filesystem::path> {
      if (!j.contains(key) || j[key].is_null()) return std::nullopt;
      std::filesystem::path p = j[key].get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      return p.lexically_normal();
    };
    sc.subtitle_path = resolve("subtitle_path");
    sc.synopsis_path = resolve("synopsis_path");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseFailure, std::string("sidecar field: ") + e.what());
  }
  if (sc.id.empty()) throw Error(ErrorCode::kParseFailure, "sidecar has an empty id");
  if (!sc.subtitle_path && !sc.synopsis_path) {
    throw Error(ErrorCode::kParseFailure,
                "sidecar '" + sc.id + "' names neither subtitle_path nor synopsis_path");
  }
  return sc;
}

std::vector<TitleSidecar> LoadSidecars(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kMissingInput, "metadata directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<TitleSidecar> out;
  for (const auto& f : files) out.push_back(ParseSidecar(ReadTextFile(f), dir));
  std::stable_sort(out.begin(), out.end(),
                   [](const TitleSidecar& a, const TitleSidecar& b) { return a.id < b.id; });
  return out;
}

}  // namespace diana
