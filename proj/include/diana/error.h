#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace diana {

enum class ErrorCode {
  kMalformedTimestamp,
  kEmptyFile,
  kEmptyCollection,
  kInfeasibleAlignment,
  kEmptyGold,
  kZeroLengthSummary,
  kIoFailure,
  kParseFailure,
  kInvariantViolation,
  kEmptyCorpus,
  kMissingInput,
  kMissingGold,
  kInvalidConfig,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure surfaced by the library. `line` is set for errors tied to a
// position in an input file (1-based).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<int> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<int> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<int> line_;
};

}  // namespace diana
