#include "tubecheck/error.hpp"

namespace tubecheck {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::PoleAtParameter: return "PoleAtParameter";
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::ZeroDivisor: return "ZeroDivisor";
    case ErrorCode::DependentGenerators: return "DependentGenerators";
    case ErrorCode::NegativeRadicand: return "NegativeRadicand";
    case ErrorCode::ImaginaryPresent: return "ImaginaryPresent";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::ParameterOutOfDomain: return "ParameterOutOfDomain";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateQuadraticPart: return "DegenerateQuadraticPart";
    case ErrorCode::NonHolomorphicComponent: return "NonHolomorphicComponent";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NotOnHypersurface: return "NotOnHypersurface";
    case ErrorCode::UnsupportedTemplate: return "UnsupportedTemplate";
    case ErrorCode::AbsorptionFailed: return "AbsorptionFailed";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::NegativeParameter: return "NegativeParameter";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::SingularCubic: return "SingularCubic";
    case ErrorCode::ProportionalityFailed: return "ProportionalityFailed";
    case ErrorCode::SingularModel: return "SingularModel";
    case ErrorCode::PoleAt: return "PoleAt";
    case ErrorCode::ExcludedParameter: return "ExcludedParameter";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnsupportedRadicand: return "UnsupportedRadicand";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace tubecheck
