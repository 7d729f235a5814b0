#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sgpca {

// Failure taxonomy shared by the library and the CLI. The CLI maps codes
// onto process exit codes: usage -> 1, data -> 2, numerical -> 3.
enum class ErrorCode {
  DegenerateVector,
  DimensionMismatch,
  ThresholdTooLarge,
  NoConvergence,
  RankCollapse,
  EmptySelection,
  SubsampleTooSmall,
  TuningFailed,
  DegenerateSpec,
  DomainError,
  DataError,
  IoError,
  UsageError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateVector: return "degenerate-vector";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::ThresholdTooLarge: return "threshold-too-large";
    case ErrorCode::NoConvergence: return "no-convergence";
    case ErrorCode::RankCollapse: return "rank-collapse";
    case ErrorCode::EmptySelection: return "empty-selection";
    case ErrorCode::SubsampleTooSmall: return "subsample-too-small";
    case ErrorCode::TuningFailed: return "tuning-failed";
    case ErrorCode::DegenerateSpec: return "degenerate-spec";
    case ErrorCode::DomainError: return "domain-error";
    case ErrorCode::DataError: return "data-error";
    case ErrorCode::IoError: return "io-error";
    case ErrorCode::UsageError: return "usage-error";
  }
  return "unknown";
}

}  // namespace sgpca
