#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace markov_uq {

/// Failure categories raised by the library. The CLI maps them onto exit codes.
enum class ErrorKind {
  // model validation
  InvalidModel,
  DimensionMismatch,
  MeasureMismatch,
  Reducible,
  NonPositive,
  SupportMismatch,
  NotInvariant,
  NotReversible,
  LiapunovViolated,
  ConstraintViolated,
  TruncationTooSmall,
  DimensionTooLarge,
  StateSpaceTooLarge,
  Disconnected,
  DomainViolation,
  OutOfRange,
  // numerics
  EigenFailure,
  ZeroGap,
  SingularPoisson,
  EvaluationFailure,
  EtaUnreachable,
  ConstantObservable,
  InsufficientSamples,
  NonDecaying,
  SimulationBlowup,
  // assembly
  NoApplicableMethod,
};

std::string_view to_string(ErrorKind kind);

/// True for errors that stem from malformed or inconsistent models rather
/// than numerical breakdown.
bool is_model_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace markov_uq
