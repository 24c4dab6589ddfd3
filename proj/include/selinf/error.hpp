#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace selinf {

enum class ErrorCode {
  InvalidInput,
  MissingTreatment,
  NegativeProbability,
  SumNotOne,
  UnknownInput,
  SameInput,
  UnrankedValue,
  ValueNotInPartition,
  InvalidP,
  InvalidExponent,
  GroundAxiomViolation,
  CapExceeded,
  HiddenSpaceTooLarge,
  NumericalInstability,
  MarginalSelectivityViolated,
  InvalidCorrelation,
  NotExact,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; `code()` identifies the
// failure class so callers can branch without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace selinf
