#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace exofab {

enum class ErrorCode {
  InvalidRegion,
  InvalidConfig,
  RegionDegenerate,
  ConfigMismatch,
  ParseError,
  InvariantViolation,
  InvalidQuery,
  UnknownConfig,
  UnknownFabric,
  UnknownThread,
  UnknownKey,
  UnknownAffordance,
  InsufficientCalibration,
  NonStretchFabric,
  UnsupportedMold,
  NameTooLong,
  CoordinateOverflow,
  BadHeader,
  BadRecord,
  InvalidRequirements,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidRegion: return "InvalidRegion";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::RegionDegenerate: return "RegionDegenerate";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::UnknownConfig: return "UnknownConfig";
    case ErrorCode::UnknownFabric: return "UnknownFabric";
    case ErrorCode::UnknownThread: return "UnknownThread";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::UnknownAffordance: return "UnknownAffordance";
    case ErrorCode::InsufficientCalibration: return "InsufficientCalibration";
    case ErrorCode::NonStretchFabric: return "NonStretchFabric";
    case ErrorCode::UnsupportedMold: return "UnsupportedMold";
    case ErrorCode::NameTooLong: return "NameTooLong";
    case ErrorCode::CoordinateOverflow: return "CoordinateOverflow";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::BadRecord: return "BadRecord";
    case ErrorCode::InvalidRequirements: return "InvalidRequirements";
  }
  return "Unknown";
}

// All library failures are reported through this exception. `line` is the
// 1-based source line (or row) when the error comes from a text input, and
// `offset` the byte offset when it comes from a binary input.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, long line = 0, long offset = -1)
      : std::runtime_error(message), code_(code), line_(line), offset_(offset) {}

  ErrorCode code() const noexcept { return code_; }
  long line() const noexcept { return line_; }
  long offset() const noexcept { return offset_; }

 private:
  ErrorCode code_;
  long line_;
  long offset_;
};

}  // namespace exofab
