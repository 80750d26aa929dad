#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdil {

enum class ErrorCode {
  InvalidArgument,
  NotHermitian,
  NotPSD,
  CodimensionMismatch,
  NotIsometric,
  EigenFailure,
  NotContraction,
  InvalidPowers,
  ExtensionFailure,
  NearSingularResolvent,
  HypothesisViolated,
  NotPure,
  TripleMismatch,
  Schema,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type thrown by every pdil operation. The code identifies which
/// precondition or numerical gate failed; the message carries the numbers.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pdil
