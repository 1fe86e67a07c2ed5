#include "pdfactor/error.hpp"

namespace pdfactor {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::SingularInput: return "SingularInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::NotARotation: return "NotARotation";
    case ErrorKind::TargetUnreachable: return "TargetUnreachable";
    case ErrorKind::NotOrthogonal: return "NotOrthogonal";
    case ErrorKind::NegativeDeterminant: return "NegativeDeterminant";
    case ErrorKind::NonPositiveDeterminant: return "NonPositiveDeterminant";
    case ErrorKind::InvalidStep: return "InvalidStep";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<double> achievable)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      achievable_(achievable) {}

}  // namespace pdfactor
