#include "gmbe/error.hpp"

namespace gmbe {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegreeViolation: return "DegreeViolation";
    case ErrorKind::NotAGrid: return "NotAGrid";
    case ErrorKind::OddFactorCount: return "OddFactorCount";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ConstraintViolated: return "ConstraintViolated";
    case ErrorKind::GenerationFailed: return "GenerationFailed";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::ZeroWeight: return "ZeroWeight";
    case ErrorKind::WidthExceeded: return "WidthExceeded";
    case ErrorKind::IboundTooSmall: return "IboundTooSmall";
    case ErrorKind::NumericalUnderflow: return "NumericalUnderflow";
    case ErrorKind::ZeroFactorEntry: return "ZeroFactorEntry";
    case ErrorKind::SingularGaugeStep: return "SingularGaugeStep";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnsupportedPreamble: return "UnsupportedPreamble";
    case ErrorKind::NegativeValues: return "NegativeValues";
  }
  return "Unknown";
}

}  // namespace gmbe
