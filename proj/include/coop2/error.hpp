#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coop2 {

enum class ErrorCode {
  ZeroEntry,
  BadK,
  BadDimension,
  NoConvergence,
  GapTooSmall,
  NotUnstable,
  DimensionMismatch,
  OutOfDomain,
  SyntaxError,
  UnknownIdentifier,
  UnboundIdentifier,
  DivisionNearZero,
  BadParams,
  NotInterior,
  StepUnderflow,
  LeftDomain,
  SeparationFailure,
  NotPositiveDefinite,
  ZeroVector,
  BadConfig,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code; every library failure is one of these.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace coop2
