#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace statealign {

enum class ErrorCode {
  ContractViolation,
  SegmentTooShort,
  DegenerateSeries,
  NumericalBreakdown,
  PreconditionViolation,
  EmptySequence,
  AlphabetMismatch,
  ShiftTooLarge,
  BadDistanceMatrix,
  MissingLabels,
  SpecInvalid,
  ParseError,
  IrregularStride,
  InsufficientOverlap,
  ConfigError,
  IoError,
};

inline std::string_view to_string(ErrorCode code) noexcept;

/// Whether an error stems from bad input or configuration (as opposed to a
/// numerical failure inside the library). Drives the CLI exit code.
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the error-code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ContractViolation: return "ContractViolation";
    case ErrorCode::SegmentTooShort: return "SegmentTooShort";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::ShiftTooLarge: return "ShiftTooLarge";
    case ErrorCode::BadDistanceMatrix: return "BadDistanceMatrix";
    case ErrorCode::MissingLabels: return "MissingLabels";
    case ErrorCode::SpecInvalid: return "SpecInvalid";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IrregularStride: return "IrregularStride";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

inline bool is_input_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NumericalBreakdown:
    case ErrorCode::ContractViolation:
      return false;
    default:
      return true;
  }
}

}  // namespace statealign
