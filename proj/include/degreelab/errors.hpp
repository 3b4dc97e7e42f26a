#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace degreelab {

enum class ErrorKind {
  DimensionMismatch,
  SingularGram,
  HypothesisViolation,
  Unsupported,
  ModelRejected,
  Indeterminate,
  NumericalFailure,
  ResourceExceeded,
  PreconditionError,
  StructuralFailure,
};

std::string_view to_string(ErrorKind kind);

/// Structured error raised by every module. The kind is stable and is what
/// the command-line front end maps onto exit codes and failure records.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularGram: return "SingularGram";
    case ErrorKind::HypothesisViolation: return "HypothesisViolation";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::ModelRejected: return "ModelRejected";
    case ErrorKind::Indeterminate: return "IndeterminateError";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::ResourceExceeded: return "ResourceExceeded";
    case ErrorKind::PreconditionError: return "PreconditionError";
    case ErrorKind::StructuralFailure: return "StructuralFailure";
  }
  return "Unknown";
}

}  // namespace degreelab
