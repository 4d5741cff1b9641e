#include "markov_uq/error.hpp"

namespace markov_uq {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MeasureMismatch: return "MeasureMismatch";
    case ErrorKind::Reducible: return "Reducible";
    case ErrorKind::NonPositive: return "NonPositive";
    case ErrorKind::SupportMismatch: return "SupportMismatch";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::NotReversible: return "NotReversible";
    case ErrorKind::LiapunovViolated: return "LiapunovViolated";
    case ErrorKind::ConstraintViolated: return "ConstraintViolated";
    case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::ZeroGap: return "ZeroGap";
    case ErrorKind::SingularPoisson: return "SingularPoisson";
    case ErrorKind::EvaluationFailure: return "EvaluationFailure";
    case ErrorKind::EtaUnreachable: return "EtaUnreachable";
    case ErrorKind::ConstantObservable: return "ConstantObservable";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::NonDecaying: return "NonDecaying";
    case ErrorKind::SimulationBlowup: return "SimulationBlowup";
    case ErrorKind::NoApplicableMethod: return "NoApplicableMethod";
  }
  return "Unknown";
}

bool is_model_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidModel:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::MeasureMismatch:
    case ErrorKind::Reducible:
    case ErrorKind::NonPositive:
    case ErrorKind::SupportMismatch:
    case ErrorKind::NotInvariant:
    case ErrorKind::NotReversible:
    case ErrorKind::LiapunovViolated:
    case ErrorKind::ConstraintViolated:
    case ErrorKind::TruncationTooSmall:
    case ErrorKind::DimensionTooLarge:
    case ErrorKind::StateSpaceTooLarge:
    case ErrorKind::Disconnected:
    case ErrorKind::DomainViolation:
    case ErrorKind::OutOfRange:
      return true;
    default:
      return false;
  }
}

}  // namespace markov_uq
