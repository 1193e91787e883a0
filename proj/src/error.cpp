#include "gchisq/error.hpp"

namespace gchisq {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyPositiveList: return "EmptyPositiveList";
    case Errc::NonPositiveTheta: return "NonPositiveTheta";
    case Errc::NonIntegerDof: return "NonIntegerDof";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ShiftTooLarge: return "ShiftTooLarge";
    case Errc::PoleEvaluation: return "PoleEvaluation";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::RouteUnavailable: return "RouteUnavailable";
    case Errc::NotAPositiveCombination: return "NotAPositiveCombination";
    case Errc::Theta0OutOfRange: return "Theta0OutOfRange";
    case Errc::DuplicateRates: return "DuplicateRates";
    case Errc::SaddleOutOfRange: return "SaddleOutOfRange";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace gchisq
