#include "diana/textsim.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "diana/error.h"
#include "diana/utf8.h"
#include "json.hpp"

namespace diana {

TokenSeq Tokenize(std::string_view text) {
  TokenSeq tokens;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = utf8::Next(text, pos);
    if (utf8::IsWordChar(cp)) {
      utf8::Append(utf8::ToLower(cp), current);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double Jaccard(const TokenSeq& a, const TokenSeq& b) {
  const std::set<std::string_view> sa(a.begin(), a.end());
  const std::set<std::string_view> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t common = 0;
  for (auto t : sa) common += sb.count(t);
  return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

namespace {

std::map<std::string_view, std::size_t> Counts(const TokenSeq& seq) {
  std::map<std::string_view, std::size_t> counts;
  for (const auto& t : seq) ++counts[t];
  return counts;
}

}  // namespace

double Rouge1F(const TokenSeq& candidate, const TokenSeq& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const auto cand = Counts(candidate);
  const auto ref = Counts(reference);
  std::size_t overlap = 0;
  for (const auto& [term, n] : cand) {
    if (auto it = ref.find(term); it != ref.end()) overlap += std::min(n, it->second);
  }
  if (overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(candidate.size());
  const double r = static_cast<double>(overlap) / static_cast<double>(reference.size());
  return 2.0 * p * r / (p + r);
}

IdfTable::IdfTable(std::size_t doc_count, std::map<std::string, std::size_t> doc_freq)
    : doc_count_(doc_count), doc_freq_(std::move(doc_freq)) {}

double IdfTable::operator()(const std::string& term) const {
  std::size_t df = 0;
  if (auto it = doc_freq_.find(term); it != doc_freq_.end()) df = it->second;
  return std::log((1.0 + static_cast<double>(doc_count_)) / (1.0 + static_cast<double>(df))) +
         1.0;
}

IdfTable BuildIdf(std::span<const TokenSeq> docs) {
  if (docs.empty()) throw Error(ErrorCode::kEmptyCollection, "IDF needs at least one document");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    const std::set<std::string_view> unique(doc.begin(), doc.end());
    for (auto t : unique) ++df[std::string(t)];
  }
  return IdfTable(docs.size(), std::move(df));
}

TfIdfVector MakeTfIdfVector(const TokenSeq& doc, const IdfTable& idf) {
  TfIdfVector v;
  for (const auto& t : doc) v[t] += 1.0;
  for (auto& [term, w] : v) w *= idf(term);
  return v;
}

double Dot(const TfIdfVector& u, const TfIdfVector& v) {
  const TfIdfVector& small = u.size() <= v.size() ? u : v;
  const TfIdfVector& large = u.size() <= v.size() ? v : u;
  double dot = 0.0;
  for (const auto& [term, w] : small) {
    if (auto it = large.find(term); it != large.end()) dot += w * it->second;
  }
  return dot;
}

double Norm(const TfIdfVector& u) {
  double sq = 0.0;
  for (const auto& [term, w] : u) sq += w * w;
  return std::sqrt(sq);
}

double Cosine(const TfIdfVector& u, const TfIdfVector& v) {
  if (u.empty() || v.empty()) return 0.0;
  const double denom = Norm(u) * Norm(v);
  if (denom == 0.0) return 0.0;
  return std::clamp(Dot(u, v) / denom, 0.0, 1.0);
}

std::string_view MeasureName(Measure m) {
  switch (m) {
    case Measure::kJaccard: return "jaccard";
    case Measure::kRouge1F: return "rouge1f";
    case Measure::kTfIdf: return "tfidf";
    case Measure::kTfIdfNormalized: return "tfidf_normalized";
    case Measure::kTfIdfVectorNormalized: return "tfidf_vecnorm";
  }
  return "unknown";
}

std::optional<Measure> ParseMeasure(std::string_view name) {
  for (Measure m : {Measure::kJaccard, Measure::kRouge1F, Measure::kTfIdf,
                    Measure::kTfIdfNormalized, Measure::kTfIdfVectorNormalized}) {
    if (MeasureName(m) == name) return m;
  }
  return std::nullopt;
}

SimilarityMatrix::SimilarityMatrix(std::size_t rows, std::size_t cols, Measure measure)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0), measure_(measure) {}

SimilarityMatrix::SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                                   Measure measure)
    : rows_(rows), cols_(cols), values_(std::move(values)), measure_(measure) {
  if (values_.size() != rows_ * cols_) {
    throw std::invalid_argument("similarity matrix: value count does not match shape");
  }
}

std::string SimilarityMatrix::ToJson() const {
  nlohmann::ordered_json j;
  j["measure"] = MeasureName(measure_);
  j["rows"] = rows_;
  j["cols"] = cols_;
  j["values"] = values_;
  return j.dump();
}

void NormalizeRows(SimilarityMatrix& sim) {
  for (std::size_t i = 0; i < sim.rows(); ++i) {
    double sq = 0.0;
    for (double v : sim.row(i)) sq += v * v;
    if (sq == 0.0) continue;
    const double norm = std::sqrt(sq);
    for (std::size_t j = 0; j < sim.cols(); ++j) sim(i, j) /= norm;
  }
}

SimilarityMatrix ComputeSimilarity(std::span<const TokenSeq> narratives,
                                   std::span<const TokenSeq> dialogues, Measure measure) {
  if (narratives.empty() || dialogues.empty()) {
    throw Error(ErrorCode::kEmptyCollection,
                "similarity needs at least one narrative segment and one dialogue session");
  }
  const std::size_t m = narratives.size();
  const std::size_t n = dialogues.size();
  SimilarityMatrix sim(m, n, measure);

  switch (measure) {
    case Measure::kJaccard:
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) sim(i, j) = Jaccard(narratives[i], dialogues[j]);
      return sim;
    case Measure::kRouge1F:
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) sim(i, j) = Rouge1F(dialogues[j], narratives[i]);
      return sim;
    case Measure::kTfIdf:
    case Measure::kTfIdfNormalized:
    case Measure::kTfIdfVectorNormalized:
      break;
  }

  // One IDF collection per title: every segment and every session.
  std::vector<TokenSeq> collection(narratives.begin(), narratives.end());
  collection.insert(collection.end(), dialogues.begin(), dialogues.end());
  const IdfTable idf = BuildIdf(collection);

  std::vector<TfIdfVector> nv, dv;
  nv.reserve(m);
  dv.reserve(n);
  for (const auto& t : narratives) nv.push_back(MakeTfIdfVector(t, idf));
  for (const auto& t : dialogues) dv.push_back(MakeTfIdfVector(t, idf));

  if (measure == Measure::kTfIdfVectorNormalized) {
    for (std::size_t i = 0; i < m; ++i) {
      const double norm = Norm(nv[i]);
      if (norm == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) sim(i, j) = Dot(nv[i], dv[j]) / norm;
    }
    return sim;
  }

  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) sim(i, j) = Cosine(nv[i], dv[j]);
  if (measure == Measure::kTfIdfNormalized) NormalizeRows(sim);
  return sim;
}

SimilarityMatrix ComputeSimilarity(std::span<const NarrativeSegment> segments,
                                   std::span<const DialogueSession> sessions, Measure measure) {
  std::vector<TokenSeq> narratives, dialogues;
  narratives.reserve(segments.size());
  dialogues.reserve(sessions.size());
  for (const auto& s : segments) narratives.push_back(Tokenize(s.text));
  for (const auto& d : sessions) dialogues.push_back(Tokenize(SessionPlainText(d)));
  return ComputeSimilarity(narratives, dialogues, measure);
}

}  // namespace diana
