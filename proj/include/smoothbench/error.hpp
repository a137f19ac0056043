#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smoothbench {

enum class ErrorKind {
  DuplicateTimestamp,
  EmptyInput,
  InsufficientData,
  MixedSites,
  NonPositivePopulation,
  NonPositiveBiomarkerLoad,
  MisalignedSeries,
  ZeroBiomarkerConcentration,
  InvalidParams,
  SeriesTooShort,
  DegenerateLikelihood,
  NonParametricMethod,
  EvaluationFailure,
  TooFewPoints,
  DegenerateDesign,
  MissingBiomarker,
  MissingBiomarkerLoad,
  SchemaError,
  ParseError,
  IoError,
  Internal,
};

std::string_view to_string(ErrorKind kind);

/// True for errors caused by user input (bad files, bad flags, unusable data).
bool is_input_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace smoothbench
