#include "smoothbench/error.hpp"

namespace smoothbench {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DuplicateTimestamp: return "DuplicateTimestamp";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::MixedSites: return "MixedSites";
    case ErrorKind::NonPositivePopulation: return "NonPositivePopulation";
    case ErrorKind::NonPositiveBiomarkerLoad: return "NonPositiveBiomarkerLoad";
    case ErrorKind::MisalignedSeries: return "MisalignedSeries";
    case ErrorKind::ZeroBiomarkerConcentration: return "ZeroBiomarkerConcentration";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::DegenerateLikelihood: return "DegenerateLikelihood";
    case ErrorKind::NonParametricMethod: return "NonParametricMethod";
    case ErrorKind::EvaluationFailure: return "EvaluationFailure";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::DegenerateDesign: return "DegenerateDesign";
    case ErrorKind::MissingBiomarker: return "MissingBiomarker";
    case ErrorKind::MissingBiomarkerLoad: return "MissingBiomarkerLoad";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Internal:
    case ErrorKind::EvaluationFailure:
    case ErrorKind::DegenerateLikelihood:
      return false;
    default:
      return true;
  }
}

}  // namespace smoothbench
