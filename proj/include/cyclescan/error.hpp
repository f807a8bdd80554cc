#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cyclescan {

enum class ErrorCode {
  ParseError,
  EmptySeries,
  NonPositivePrice,
  SeriesTooShort,
  RangeTooNarrow,
  ZeroFluctuation,
  EmptyBand,
  SampleTooSmall,
  IncompleteVector,
  DegenerateVector,
  InvalidSpec,
  InvalidArgument,
  ConfigError,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::RangeTooNarrow: return "RangeTooNarrow";
    case ErrorCode::ZeroFluctuation: return "ZeroFluctuation";
    case ErrorCode::EmptyBand: return "EmptyBand";
    case ErrorCode::SampleTooSmall: return "SampleTooSmall";
    case ErrorCode::IncompleteVector: return "IncompleteVector";
    case ErrorCode::DegenerateVector: return "DegenerateVector";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace detail

}  // namespace cyclescan
