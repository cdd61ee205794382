#include "diana/corpus.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "diana/error.h"
#include "diana/textsim.h"
#include "json.hpp"

namespace diana {

std::string FormatDecimal(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kInvariantViolation, "non-finite value in corpus record");
  }
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 6);
  if (ec != std::errc()) throw Error(ErrorCode::kIoFailure, "cannot format number");
  std::string out(buf, end);
  while (out.back() == '0' && out[out.size() - 2] != '.') out.pop_back();
  if (out == "-0.0") out = "0.0";
  return out;
}

void CheckPairRecord(const PairRecord& record) {
  if (record.dialogue.empty()) throw Error(ErrorCode::kInvariantViolation, "empty dialogue");
  if (record.narrative.empty()) throw Error(ErrorCode::kInvariantViolation, "empty narrative");
  for (std::size_t k = 1; k < record.dialogue_ids.size(); ++k) {
    if (record.dialogue_ids[k] <= record.dialogue_ids[k - 1]) {
      throw Error(ErrorCode::kInvariantViolation, "dialogue_ids not strictly increasing");
    }
  }
}

std::string ToJsonLine(const PairRecord& r) {
  auto str = [](const std::string& s) { return nlohmann::json(s).dump(); };
  std::string line = "{\"title_id\":" + str(r.title_id);
  line += ",\"narrative_id\":" + std::to_string(r.narrative_id);
  line += ",\"dialogue\":" + str(r.dialogue);
  line += ",\"narrative\":" + str(r.narrative);
  line += ",\"dialogue_ids\":[";
  for (std::size_t k = 0; k < r.dialogue_ids.size(); ++k) {
    if (k) line += ',';
    line += std::to_string(r.dialogue_ids[k]);
  }
  line += "],\"coverage\":" + FormatDecimal(r.coverage);
  line += ",\"density\":" + FormatDecimal(r.density);
  line += ",\"align_score\":" + FormatDecimal(r.align_score);
  line += '}';
  return line;
}

std::size_t WriteJsonl(std::span<const PairRecord> pairs, std::ostream& sink) {
  std::size_t written = 0;
  for (const auto& p : pairs) {
    sink << ToJsonLine(p) << '\n';
    if (!sink) throw Error(ErrorCode::kIoFailure, "write failed after " + std::to_string(written) + " lines");
    ++written;
  }
  sink.flush();
  if (!sink) throw Error(ErrorCode::kIoFailure, "flush failed");
  return written;
}

std::vector<PairRecord> ReadJsonl(std::istream& source) {
  std::vector<PairRecord> out;
  std::string line;
  int number = 0;
  while (std::getline(source, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    PairRecord r;
    try {
      const auto j = nlohmann::json::parse(line);
      r.title_id = j.at("title_id").get<std::string>();
      r.narrative_id = j.at("narrative_id").get<int>();
      r.dialogue = j.at("dialogue").get<std::string>();
      r.narrative = j.at("narrative").get<std::string>();
      r.dialogue_ids = j.at("dialogue_ids").get<std::vector<int>>();
      r.coverage = j.at("coverage").get<double>();
      r.density = j.at("density").get<double>();
      r.align_score = j.at("align_score").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseFailure, e.what(), number);
    }
    try {
      CheckPairRecord(r);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvariantViolation, e.what(), number);
    }
    out.push_back(std::move(r));
  }
  if (source.bad()) throw Error(ErrorCode::kIoFailure, "read failed", number);
  return out;
}

CorpusStats Stats(std::span<const PairRecord> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyCorpus, "no pairs to summarize");
  CorpusStats s;
  s.pair_count = pairs.size();
  for (const auto& p : pairs) {
    s.avg_dialogue_tokens += static_cast<double>(Tokenize(p.dialogue).size());
    s.avg_narrative_tokens += static_cast<double>(Tokenize(p.narrative).size());
    s.coverage_mean += p.coverage;
    s.density_mean += p.density;
  }
  const auto n = static_cast<double>(pairs.size());
  s.avg_dialogue_tokens /= n;
  s.avg_narrative_tokens /= n;
  s.coverage_mean /= n;
  s.density_mean /= n;
  return s;
}

std::string StatsToJson(const CorpusStats& stats) {
  nlohmann::ordered_json j;
  j["pair_count"] = stats.pair_count;
  j["avg_dialogue_tokens"] = stats.avg_dialogue_tokens;
  j["avg_narrative_tokens"] = stats.avg_narrative_tokens;
  j["coverage_mean"] = stats.coverage_mean;
  j["density_mean"] = stats.density_mean;
  j["tokenizer"] = "lowercase, split on non-alphanumeric";
  return j.dump(2);
}

}  // namespace diana
