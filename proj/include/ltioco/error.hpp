#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ltioco {

enum class Errc {
  UnknownClock,
  ClockMismatch,
  EmptyZone,
  NotComposable,
  DiagonalConstraint,
  InvalidCeiling,
  UnknownLabel,
  AlphabetMismatch,
  StrictConstraintRejected,
  SyntaxError,
  SemanticError,
  InvalidModel,
};

inline std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::UnknownClock: return "UnknownClock";
    case Errc::ClockMismatch: return "ClockMismatch";
    case Errc::EmptyZone: return "EmptyZone";
    case Errc::NotComposable: return "NotComposable";
    case Errc::DiagonalConstraint: return "DiagonalConstraint";
    case Errc::InvalidCeiling: return "InvalidCeiling";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::AlphabetMismatch: return "AlphabetMismatch";
    case Errc::StrictConstraintRejected: return "StrictConstraintRejected";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::SemanticError: return "SemanticError";
    case Errc::InvalidModel: return "InvalidModel";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ltioco
