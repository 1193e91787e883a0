#pragma once

#include <stdexcept>
#include <string>

namespace gchisq {

enum class Errc {
  EmptyPositiveList,
  NonPositiveTheta,
  NonIntegerDof,
  InvalidArgument,
  ShiftTooLarge,
  PoleEvaluation,
  NoConvergence,
  RouteUnavailable,
  NotAPositiveCombination,
  Theta0OutOfRange,
  DuplicateRates,
  SaddleOutOfRange,
  ParseError,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace gchisq
