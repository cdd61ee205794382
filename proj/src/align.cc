#include "diana/align.h"

#include <cstdlib>
#include <functional>
#include <stdexcept>

#include "diana/error.h"
#include "json.hpp"

namespace diana {

std::string_view TrailingSkipName(TrailingSkip t) {
  return t == TrailingSkip::kBounded ? "bounded" : "unbounded";
}

namespace {

void CheckShape(const SimilarityMatrix& sim, int max_skip) {
  if (sim.rows() == 0 || sim.cols() == 0) {
    throw Error(ErrorCode::kEmptyCollection, "alignment needs a non-empty similarity matrix");
  }
  if (max_skip < 0) throw std::invalid_argument("skip budget K must be non-negative");
}

std::size_t FirstTerminalRow(std::size_t m, int max_skip, TrailingSkip trailing) {
  if (trailing == TrailingSkip::kUnbounded) return 0;
  const auto k = static_cast<std::size_t>(max_skip);
  return m > k + 1 ? m - 1 - k : 0;
}

}  // namespace

AlignmentResult Align(const SimilarityMatrix& sim, int max_skip, TrailingSkip trailing) {
  CheckShape(sim, max_skip);
  const std::size_t m = sim.rows();
  const std::size_t n = sim.cols();
  const std::size_t jump = static_cast<std::size_t>(max_skip) + 1;

  // score(i, j), reachable(i, j) and the k chosen for (i, j).
  std::vector<double> score(m * n, 0.0);
  std::vector<char> reachable(m * n, 0);
  std::vector<std::size_t> back(m * n, 0);
  auto at = [n](std::size_t i, std::size_t j) { return i * n + j; };

  for (std::size_t i = 0; i < m && i < jump; ++i) {
    score[at(i, 0)] = sim(i, 0);
    reachable[at(i, 0)] = 1;
  }
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      bool found = false;
      double best = 0.0;
      std::size_t best_k = 0;
      for (std::size_t k = 0; k <= jump && k <= i; ++k) {
        const std::size_t prev = at(i - k, j - 1);
        if (!reachable[prev]) continue;
        if (!found || score[prev] > best) {
          found = true;
          best = score[prev];
          best_k = k;
        }
      }
      if (!found) continue;
      reachable[at(i, j)] = 1;
      score[at(i, j)] = best + sim(i, j);
      back[at(i, j)] = best_k;
    }
  }

  bool found = false;
  std::size_t last = 0;
  for (std::size_t i = FirstTerminalRow(m, max_skip, trailing); i < m; ++i) {
    if (!reachable[at(i, n - 1)]) continue;
    if (!found || score[at(i, n - 1)] >= score[at(last, n - 1)]) {
      found = true;
      last = i;
    }
  }
  if (!found) {
    throw Error(ErrorCode::kInfeasibleAlignment,
                "no admissible alignment of " + std::to_string(n) + " dialogues onto " +
                    std::to_string(m) + " narratives with K=" + std::to_string(max_skip));
  }

  AlignmentResult result;
  result.narrative_count = m;
  result.score = score[at(last, n - 1)];
  result.assignment.assign(n, 0);
  std::size_t i = last;
  for (std::size_t j = n; j-- > 0;) {
    result.assignment[j] = static_cast<int>(i);
    if (j > 0) i -= back[at(i, j)];
  }
  return result;
}

namespace {

// True when `a` beats `b` under the shared tie rule: compare from the last
// dialogue backwards, larger rows win.
bool BackwardGreater(const std::vector<int>& a, const std::vector<int>& b) {
  for (std::size_t j = a.size(); j-- > 0;) {
    if (a[j] != b[j]) return a[j] > b[j];
  }
  return false;
}

}  // namespace

AlignmentResult BruteForceAlign(const SimilarityMatrix& sim, int max_skip,
                                TrailingSkip trailing) {
  CheckShape(sim, max_skip);
  const int m = static_cast<int>(sim.rows());
  const int n = static_cast<int>(sim.cols());
  const int first_terminal = static_cast<int>(FirstTerminalRow(sim.rows(), max_skip, trailing));

  AlignmentResult best;
  best.narrative_count = sim.rows();
  bool found = false;
  std::vector<int> path(n, 0);

  std::function<void(int, double)> extend = [&](int j, double partial) {
    if (j == n) {
      if (path.back() < first_terminal) return;
      if (!found || partial > best.score ||
          (partial == best.score && BackwardGreater(path, best.assignment))) {
        found = true;
        best.score = partial;
        best.assignment = path;
      }
      return;
    }
    const int lo = j == 0 ? 0 : path[j - 1];
    const int hi = j == 0 ? max_skip : path[j - 1] + max_skip + 1;
    for (int i = lo; i <= hi && i < m; ++i) {
      path[j] = i;
      extend(j + 1, j == 0 ? sim(i, 0) : partial + sim(i, j));
    }
  };
  extend(0, 0.0);

  if (!found) {
    throw Error(ErrorCode::kInfeasibleAlignment, "no admissible alignment (brute force)");
  }
  return best;
}

GoldAlignment ParseGoldJson(std::string_view text) {
  GoldAlignment gold;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::kParseFailure, "gold alignment must be an object");
    for (const auto& [key, value] : j.items()) {
      const int dialogue = std::stoi(key);
      const int narrative = value.get<int>();
      if (dialogue < 1 || narrative < 1) {
        throw Error(ErrorCode::kInvariantViolation,
                    "gold indices are 1-based, got " + key + " -> " + std::to_string(narrative));
      }
      gold.assignment[dialogue - 1] = narrative - 1;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseFailure, std::string("gold alignment: ") + e.what());
  } catch (const std::logic_error& e) {
    throw Error(ErrorCode::kParseFailure, std::string("gold alignment key: ") + e.what());
  }
  return gold;
}

void CheckGoldBounds(const GoldAlignment& gold, std::size_t m, std::size_t n) {
  for (const auto& [j, i] : gold.assignment) {
    if (j < 0 || static_cast<std::size_t>(j) >= n || i < 0 || static_cast<std::size_t>(i) >= m) {
      throw Error(ErrorCode::kInvariantViolation,
                  "gold pair " + std::to_string(j + 1) + " -> " + std::to_string(i + 1) +
                      " outside " + std::to_string(m) + " x " + std::to_string(n));
    }
  }
}

AlignmentTally Tally(const AlignmentResult& pred, const GoldAlignment& gold) {
  AlignmentTally tally;
  for (const auto& [j, i] : gold.assignment) {
    if (j < 0 || static_cast<std::size_t>(j) >= pred.assignment.size()) {
      throw Error(ErrorCode::kInvariantViolation,
                  "gold dialogue " + std::to_string(j + 1) + " not in prediction");
    }
    ++tally.labeled;
    const int got = pred.assignment[static_cast<std::size_t>(j)];
    if (got == i) {
      ++tally.correct;
    } else if (std::abs(got - i) == 1) {
      ++tally.adjacent_errors;
    }
  }
  return tally;
}

double Accuracy(const AlignmentResult& pred, const GoldAlignment& gold) {
  if (gold.assignment.empty()) throw Error(ErrorCode::kEmptyGold, "gold alignment is empty");
  const AlignmentTally t = Tally(pred, gold);
  return static_cast<double>(t.correct) / static_cast<double>(t.labeled);
}

double AdjacencyErrorRate(const AlignmentResult& pred, const GoldAlignment& gold) {
  const AlignmentTally t = Tally(pred, gold);
  const std::size_t errors = t.labeled - t.correct;
  if (errors == 0) return 0.0;
  return static_cast<double>(t.adjacent_errors) / static_cast<double>(errors);
}

std::string AlignmentToJson(const AlignmentResult& result, int max_skip, Measure measure) {
  nlohmann::ordered_json assignment = nlohmann::ordered_json::object();
  for (std::size_t j = 0; j < result.assignment.size(); ++j) {
    assignment[std::to_string(j + 1)] = result.assignment[j] + 1;
  }
  nlohmann::ordered_json out;
  out["assignment"] = std::move(assignment);
  out["score"] = result.score;
  out["K"] = max_skip;
  out["measure"] = MeasureName(measure);
  return out.dump();
}

}  // namespace diana
