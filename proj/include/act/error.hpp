#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace act {

enum class Errc {
  InvalidOperator,
  InvalidDimension,
  InvalidMode,
  DegenerateInput,
  InvalidShape,
  SymmetryViolation,
  InvalidComplexStructure,
  IncompatibleTensors,
  PreconditionFailed,
  StructureViolation,
  InvalidPolynomial,
  UnsupportedDimension,
  NotRankOne,
  NotRationallyRepresentable,
  ClassificationInconsistency,
  FormatError,
  ConflictingEntry,
  BianchiViolation,
};

constexpr std::string_view error_name(Errc code) {
  switch (code) {
    case Errc::InvalidOperator: return "InvalidOperator";
    case Errc::InvalidDimension: return "InvalidDimension";
    case Errc::InvalidMode: return "InvalidMode";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::InvalidShape: return "InvalidShape";
    case Errc::SymmetryViolation: return "SymmetryViolation";
    case Errc::InvalidComplexStructure: return "InvalidComplexStructure";
    case Errc::IncompatibleTensors: return "IncompatibleTensors";
    case Errc::PreconditionFailed: return "PreconditionFailed";
    case Errc::StructureViolation: return "StructureViolation";
    case Errc::InvalidPolynomial: return "InvalidPolynomial";
    case Errc::UnsupportedDimension: return "UnsupportedDimension";
    case Errc::NotRankOne: return "NotRankOne";
    case Errc::NotRationallyRepresentable: return "NotRationallyRepresentable";
    case Errc::ClassificationInconsistency: return "ClassificationInconsistency";
    case Errc::FormatError: return "FormatError";
    case Errc::ConflictingEntry: return "ConflictingEntry";
    case Errc::BianchiViolation: return "BianchiViolation";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above; the
/// CLI prints `error_name(code())` on its diagnostic stream.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace act
