#pragma once

#include <stdexcept>
#include <string>

namespace gmbe {

enum class ErrorKind {
  DegreeViolation,
  NotAGrid,
  OddFactorCount,
  InvalidArgument,
  DimensionMismatch,
  ConstraintViolated,
  GenerationFailed,
  SingularMatrix,
  ZeroWeight,
  WidthExceeded,
  IboundTooSmall,
  NumericalUnderflow,
  ZeroFactorEntry,
  SingularGaugeStep,
  BudgetExceeded,
  NonFiniteEvaluation,
  ParseError,
  UnsupportedPreamble,
  NegativeValues,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this type; `kind()` lets callers
// branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gmbe
