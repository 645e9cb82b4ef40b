#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tubecheck {

enum class ErrorCode {
  DivisionByZero,
  ZeroPolynomial,
  PoleAtParameter,
  SpecMismatch,
  ZeroDivisor,
  DependentGenerators,
  NegativeRadicand,
  ImaginaryPresent,
  PrecisionExhausted,
  UnknownVariable,
  ParameterOutOfDomain,
  DimensionMismatch,
  DegenerateQuadraticPart,
  NonHolomorphicComponent,
  SingularMatrix,
  NotOnHypersurface,
  UnsupportedTemplate,
  AbsorptionFailed,
  PreconditionViolated,
  NegativeParameter,
  CoincidentPoints,
  SingularCubic,
  ProportionalityFailed,
  SingularModel,
  PoleAt,
  ExcludedParameter,
  OutOfRange,
  SyntaxError,
  UnsupportedRadicand,
};

std::string_view error_code_name(ErrorCode code) noexcept;

// Single exception type for every failure surfaced by the library. The code
// identifies the failure class; the message carries the specifics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

}  // namespace tubecheck
