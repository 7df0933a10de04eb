#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace logdiff {

// Stable error codes; the CLI prints code_name() verbatim.
enum class Errc {
  InvalidParams,
  ComponentwiseOrderViolation,
  IntegralityFailure,
  NotPIntegral,
  NotInvertible,
  CriterionViolated,
  ArgumentsNotCoprime,
  BoundExceeded,
  ExponentNotInMonoid,
  NotInSpan,
  NotAUnit,
  OrderIncrease,
  OrderMismatch,
  DeterminantDivisibleByP,
  ChartNotInvertible,
  ChartMismatch,
  SyntaxError,
  ArityMismatch,
  SchemaError,
};

std::string_view code_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
  throw Error(code, std::string(code_name(code)) + ": " + what);
}

}  // namespace logdiff
