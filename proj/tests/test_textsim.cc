#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "json.hpp"

#include "diana/error.h"
#include "diana/textsim.h"

using namespace diana;

namespace {

// Straightforward scalar re-derivations used as oracles.
double OracleJaccard(const TokenSeq& a, const TokenSeq& b) {
  std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end()), uni = sa;
  uni.insert(sb.begin(), sb.end());
  if (uni.empty()) return 0.0;
  int inter = 0;
  for (const auto& t : sa) inter += sb.count(t) ? 1 : 0;
  return static_cast<double>(inter) / static_cast<double>(uni.size());
}

double OracleRouge(const TokenSeq& cand, const TokenSeq& ref) {
  int overlap = 0;
  std::set<std::string> terms(cand.begin(), cand.end());
  for (const auto& t : terms) {
    const auto c = std::count(cand.begin(), cand.end(), t);
    const auto r = std::count(ref.begin(), ref.end(), t);
    overlap += static_cast<int>(std::min(c, r));
  }
  if (overlap == 0) return 0.0;
  const double p = overlap / static_cast<double>(cand.size());
  const double r = overlap / static_cast<double>(ref.size());
  return 2 * p * r / (p + r);
}

double OracleTfIdfCosine(const std::vector<TokenSeq>& docs, const TokenSeq& a, const TokenSeq& b) {
  auto weight = [&](const TokenSeq& d, const std::string& t) {
    double df = 0;
    for (const auto& doc : docs) df += std::find(doc.begin(), doc.end(), t) != doc.end();
    const double idf = std::log((1.0 + docs.size()) / (1.0 + df)) + 1.0;
    return static_cast<double>(std::count(d.begin(), d.end(), t)) * idf;
  };
  std::set<std::string> vocab(a.begin(), a.end());
  vocab.insert(b.begin(), b.end());
  double dot = 0, na = 0, nb = 0;
  for (const auto& t : vocab) {
    const double wa = weight(a, t), wb = weight(b, t);
    dot += wa * wb;
    na += wa * wa;
    nb += wb * wb;
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / std::sqrt(na * nb);
}

TokenSeq RandomTokens(std::mt19937& rng, int max_len) {
  TokenSeq t;
  const int n = static_cast<int>(rng() % static_cast<unsigned>(max_len + 1));
  for (int k = 0; k < n; ++k) t.push_back(std::string(1, static_cast<char>('a' + rng() % 6)));
  return t;
}

}  // namespace

TEST_CASE("tokenize") {
  CHECK(Tokenize("Hello, WORLD!") == TokenSeq{"hello", "world"});
  CHECK(Tokenize("don't stop") == TokenSeq{"don", "t", "stop"});
  CHECK(Tokenize("").empty());
  CHECK(Tokenize("Don\xE2\x80\x99t  -- R2D2...") == TokenSeq{"don", "t", "r2d2"});
  CHECK(Tokenize("ÉCOLE café") == TokenSeq{"école", "café"});
}

TEST_CASE("jaccard") {
  CHECK(Jaccard({"a", "b"}, {"b", "a", "a"}) == 1.0);
  CHECK(Jaccard({"a"}, {"b"}) == 0.0);
  CHECK(Jaccard({"x", "y"}, {"y", "z"}) == doctest::Approx(1.0 / 3));
  CHECK(Jaccard({}, {}) == 0.0);
}

TEST_CASE("rouge1_f") {
  CHECK(Rouge1F({"a", "b"}, {"a", "b"}) == 1.0);
  CHECK(Rouge1F({"a"}, {"b"}) == 0.0);
  CHECK(Rouge1F({"a", "a", "b"}, {"a", "b", "b", "c"}) == doctest::Approx(4.0 / 7).epsilon(1e-12));
  CHECK(Rouge1F({}, {"a"}) == 0.0);
}

TEST_CASE("measure symmetry, ranges and finiteness") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const TokenSeq a = RandomTokens(rng, 8), b = RandomTokens(rng, 8);
    const double j = Jaccard(a, b), r = Rouge1F(a, b);
    CHECK(j == Jaccard(b, a));
    CHECK(r == doctest::Approx(Rouge1F(b, a)).epsilon(1e-12));
    CHECK(j == doctest::Approx(OracleJaccard(a, b)));
    CHECK(r == doctest::Approx(OracleRouge(a, b)));
    CHECK(std::isfinite(j));
    CHECK(std::isfinite(r));
    CHECK((j >= 0 && j <= 1));
    CHECK((r >= 0 && r <= 1));
  }
}

TEST_CASE("idf") {
  const std::vector<TokenSeq> docs = {{"a", "b"}, {"a"}, {"a", "c"}};
  const IdfTable idf = BuildIdf(docs);
  CHECK(idf("a") == doctest::Approx(1.0));
  CHECK(idf("b") == doctest::Approx(std::log(2.0) + 1.0));
  CHECK(idf("b") == doctest::Approx(1.6931).epsilon(1e-4));
  CHECK(idf("unseen") == doctest::Approx(std::log(4.0) + 1.0));
  CHECK_THROWS_AS(BuildIdf(std::vector<TokenSeq>{}), Error);
}

TEST_CASE("tfidf vectors and cosine") {
  const IdfTable idf(10, {{"a", 10}, {"b", 2}});  // idf(a) = 1
  TfIdfVector v = MakeTfIdfVector({"a", "a", "b"}, idf);
  CHECK(v.at("a") == doctest::Approx(2.0));
  CHECK(v.at("b") == doctest::Approx(idf("b") * 1.0));
  CHECK(MakeTfIdfVector({}, idf).empty());
  for (const auto& [t, w] : v) CHECK(w > 0);

  CHECK(Cosine(v, v) == doctest::Approx(1.0));
  CHECK(Cosine({{"a", 1}}, {{"b", 1}}) == 0.0);
  CHECK(Cosine({{"a", 1}}, {{"a", 1}, {"b", 1}}) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(Cosine({}, v) == 0.0);

  TfIdfVector scaled = v;
  for (auto& [t, w] : scaled) w *= 3.7;
  const TfIdfVector other = {{"a", 0.5}, {"c", 2.0}};
  CHECK(Cosine(scaled, other) == doctest::Approx(Cosine(v, other)).epsilon(1e-12));
}

TEST_CASE("similarity matrix cells match scalar oracles") {
  const std::vector<TokenSeq> narratives = {Tokenize("Neo meets Morpheus on the roof."),
                                            Tokenize("Trinity escapes the agents.")};
  const std::vector<TokenSeq> dialogues = {Tokenize("Morpheus: you are the one, Neo."),
                                           Tokenize("Agents everywhere. Trinity, run!"),
                                           Tokenize("Dodge this.")};
  std::vector<TokenSeq> all = narratives;
  all.insert(all.end(), dialogues.begin(), dialogues.end());

  const auto jac = ComputeSimilarity(narratives, dialogues, Measure::kJaccard);
  const auto rouge = ComputeSimilarity(narratives, dialogues, Measure::kRouge1F);
  const auto tfidf = ComputeSimilarity(narratives, dialogues, Measure::kTfIdf);
  const auto norm = ComputeSimilarity(narratives, dialogues, Measure::kTfIdfNormalized);
  REQUIRE(jac.rows() == 2);
  REQUIRE(jac.cols() == 3);
  for (std::size_t i = 0; i < 2; ++i) {
    double row_sq = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      const double cos = OracleTfIdfCosine(all, narratives[i], dialogues[j]);
      row_sq += cos * cos;
      CHECK(jac(i, j) == doctest::Approx(OracleJaccard(narratives[i], dialogues[j])));
      CHECK(rouge(i, j) == doctest::Approx(OracleRouge(dialogues[j], narratives[i])));
      CHECK(tfidf(i, j) == doctest::Approx(cos));
    }
    for (std::size_t j = 0; j < 3; ++j) {
      const double cos = OracleTfIdfCosine(all, narratives[i], dialogues[j]);
      CHECK(norm(i, j) == doctest::Approx(row_sq > 0 ? cos / std::sqrt(row_sq) : 0.0));
    }
  }
  // "dodge this" shares nothing with either narrative.
  CHECK(tfidf(0, 2) == 0.0);
  CHECK(jac(0, 0) > jac(0, 1));
}

TEST_CASE("normalized rows have unit norm or are zero, and keep their argmax") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TokenSeq> ns, ds;
    for (int k = 0; k < 1 + static_cast<int>(rng() % 5); ++k) ns.push_back(RandomTokens(rng, 6));
    for (int k = 0; k < 1 + static_cast<int>(rng() % 5); ++k) ds.push_back(RandomTokens(rng, 6));
    const auto base = ComputeSimilarity(ns, ds, Measure::kTfIdf);
    const auto norm = ComputeSimilarity(ns, ds, Measure::kTfIdfNormalized);
    for (std::size_t i = 0; i < base.rows(); ++i) {
      double sq = 0;
      for (double v : norm.row(i)) {
        CHECK(std::isfinite(v));
        sq += v * v;
      }
      const bool zero = std::all_of(base.row(i).begin(), base.row(i).end(),
                                    [](double v) { return v == 0.0; });
      if (zero) {
        CHECK(sq == 0.0);
      } else {
        CHECK(sq == doctest::Approx(1.0));
        const auto b = std::max_element(base.row(i).begin(), base.row(i).end()) - base.row(i).begin();
        const auto n = std::max_element(norm.row(i).begin(), norm.row(i).end()) - norm.row(i).begin();
        CHECK(b == n);
      }
      for (double v : base.row(i)) CHECK((v >= 0.0 && v <= 1.0));
    }
  }
}

TEST_CASE("identical 1x1 texts give 1 under every bounded measure") {
  const std::vector<TokenSeq> one = {Tokenize("same words here")};
  CHECK(ComputeSimilarity(one, one, Measure::kJaccard)(0, 0) == 1.0);
  CHECK(ComputeSimilarity(one, one, Measure::kRouge1F)(0, 0) == 1.0);
  CHECK(ComputeSimilarity(one, one, Measure::kTfIdf)(0, 0) == doctest::Approx(1.0));
  CHECK(ComputeSimilarity(one, one, Measure::kTfIdfNormalized)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("vector-normalized reading dots a unit narrative vector with the raw dialogue vector") {
  const std::vector<TokenSeq> ns = {{"a", "b"}};
  const std::vector<TokenSeq> ds = {{"a", "a"}, {"c"}};
  const auto sim = ComputeSimilarity(ns, ds, Measure::kTfIdfVectorNormalized);
  const IdfTable idf = BuildIdf(std::vector<TokenSeq>{{"a", "b"}, {"a", "a"}, {"c"}});
  const double na = std::sqrt(idf("a") * idf("a") + idf("b") * idf("b"));
  CHECK(sim(0, 0) == doctest::Approx(idf("a") * 2 * idf("a") / na));
  CHECK(sim(0, 1) == 0.0);
}

TEST_CASE("similarity errors and dump") {
  CHECK_THROWS_AS(ComputeSimilarity(std::vector<TokenSeq>{}, std::vector<TokenSeq>{{"a"}},
                                    Measure::kJaccard),
                  Error);
  SimilarityMatrix m(1, 2, {0.25, 0.5}, Measure::kTfIdf);
  const auto j = nlohmann::json::parse(m.ToJson());
  CHECK(j["measure"] == "tfidf");
  CHECK(j["rows"] == 1);
  CHECK(j["cols"] == 2);
  CHECK(j["values"] == nlohmann::json::array({0.25, 0.5}));
  for (Measure x : kEvalMeasures) CHECK(ParseMeasure(MeasureName(x)) == x);
  CHECK_FALSE(ParseMeasure("bm25").has_value());
}
