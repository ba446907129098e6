#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace entlab {

enum class ErrorKind {
  InvalidArgument,
  DomainMismatch,
  ZeroMassCondition,
  ZMarginalMismatch,
  BadWeights,
  CapOutOfRange,
  NonBooleanClass,
  NonClosedClass,
  LPBudgetExceeded,
  BudgetExceeded,
  SyntaxError,
  RangeError,
  InfeasibleWitness,
  PreconditionFailed,
  HypothesisNotViolated,
  LTooLarge,
  NoThreshold,
  UnknownSuite,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace entlab
