#include "diana/error.h"

namespace diana {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedTimestamp: return "MalformedTimestamp";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kEmptyCollection: return "EmptyCollection";
    case ErrorCode::kInfeasibleAlignment: return "InfeasibleAlignment";
    case ErrorCode::kEmptyGold: return "EmptyGold";
    case ErrorCode::kZeroLengthSummary: return "ZeroLengthSummary";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kParseFailure: return "ParseFailure";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kMissingInput: return "MissingInput";
    case ErrorCode::kMissingGold: return "MissingGold";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

namespace {

std::string Compose(ErrorCode code, const std::string& message,
                    std::optional<int> line) {
  std::string out(ErrorCodeName(code));
  if (line) out += " (line " + std::to_string(*line) + ")";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<int> line)
    : std::runtime_error(Compose(code, message, line)), code_(code), line_(line) {}

}  // namespace diana
