#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diana/ingest.h"
#include "diana/segment.h"

namespace diana {

using TokenSeq = std::vector<std::string>;

// Lowercase, split on every non-alphanumeric code point. No stemming, no
// stopwords.
TokenSeq Tokenize(std::string_view text);

double Jaccard(const TokenSeq& a, const TokenSeq& b);

// ROUGE-1 F with clipped unigram counts.
double Rouge1F(const TokenSeq& candidate, const TokenSeq& reference);

// Smoothed inverse document frequency, ln((1 + N) / (1 + df)) + 1.
class IdfTable {
 public:
  IdfTable() = default;
  IdfTable(std::size_t doc_count, std::map<std::string, std::size_t> doc_freq);

  double operator()(const std::string& term) const;
  std::size_t doc_count() const { return doc_count_; }
  std::size_t vocabulary_size() const { return doc_freq_.size(); }

 private:
  std::size_t doc_count_ = 0;
  std::map<std::string, std::size_t> doc_freq_;
};

// Throws Error{kEmptyCollection} when `docs` is empty.
IdfTable BuildIdf(std::span<const TokenSeq> docs);

// Sparse term -> weight map; only strictly positive weights are stored.
using TfIdfVector = std::map<std::string, double>;

TfIdfVector MakeTfIdfVector(const TokenSeq& doc, const IdfTable& idf);
double Dot(const TfIdfVector& u, const TfIdfVector& v);
double Norm(const TfIdfVector& u);
double Cosine(const TfIdfVector& u, const TfIdfVector& v);

enum class Measure {
  kJaccard,
  kRouge1F,
  kTfIdf,
  kTfIdfNormalized,
  // Alternative reading of the narrative-wise normalization: the narrative
  // TF-IDF vector is unit-normalized and dotted with the raw dialogue vector.
  kTfIdfVectorNormalized,
};

std::string_view MeasureName(Measure m);
std::optional<Measure> ParseMeasure(std::string_view name);

// The four measures compared in the alignment evaluation.
inline constexpr Measure kEvalMeasures[] = {Measure::kJaccard, Measure::kRouge1F,
                                            Measure::kTfIdf, Measure::kTfIdfNormalized};

// Dense row-major m x n matrix; rows are narrative segments, columns dialogue
// sessions. Indices are 0-based.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::size_t rows, std::size_t cols, Measure measure);
  SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                   Measure measure);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Measure measure() const { return measure_; }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * cols_, cols_);
  }
  const std::vector<double>& values() const { return values_; }

  // {"measure", "rows", "cols", "values"}.
  std::string ToJson() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  Measure measure_ = Measure::kJaccard;
};

// Divides each row by its own L2 norm; all-zero rows stay zero.
void NormalizeRows(SimilarityMatrix& sim);

SimilarityMatrix ComputeSimilarity(std::span<const TokenSeq> narratives,
                                   std::span<const TokenSeq> dialogues, Measure measure);

// Tokenizes segment texts and SessionPlainText of each session. Throws
// Error{kEmptyCollection} if either side is empty.
SimilarityMatrix ComputeSimilarity(std::span<const NarrativeSegment> segments,
                                   std::span<const DialogueSession> sessions, Measure measure);

}  // namespace diana
