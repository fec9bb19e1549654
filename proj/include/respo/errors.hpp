#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace respo {

/// Stable error codes. The CLI prints the code name verbatim on stderr so
/// scripts can grep for it; messages carry the human-readable locator.
enum class ErrorCode {
  ShapeMismatch,
  EntryOutOfRange,
  RowSumViolation,
  ZeroRow,
  NegativeWeight,
  DimensionMismatch,
  NonPositiveEpsilon,
  DegenerateMass,
  SingularSystem,
  DiscountFactorOutOfRange,
  InvalidGammaGrid,
  InvalidTolerance,
  EmptyPlayerSet,
  DuplicatePlayer,
  NonFiniteImpact,
  MalformedRow,
  DuplicateEdge,
  UnknownPlayer,
  MissingPlayer,
  SchemaViolation,
  IoFailure,
  UsageError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EntryOutOfRange: return "EntryOutOfRange";
    case ErrorCode::RowSumViolation: return "RowSumViolation";
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPositiveEpsilon: return "NonPositiveEpsilon";
    case ErrorCode::DegenerateMass: return "DegenerateMass";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::DiscountFactorOutOfRange: return "DiscountFactorOutOfRange";
    case ErrorCode::InvalidGammaGrid: return "InvalidGammaGrid";
    case ErrorCode::InvalidTolerance: return "InvalidTolerance";
    case ErrorCode::EmptyPlayerSet: return "EmptyPlayerSet";
    case ErrorCode::DuplicatePlayer: return "DuplicatePlayer";
    case ErrorCode::NonFiniteImpact: return "NonFiniteImpact";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::UnknownPlayer: return "UnknownPlayer";
    case ErrorCode::MissingPlayer: return "MissingPlayer";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace respo
