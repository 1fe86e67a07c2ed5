#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pdfactor {

enum class ErrorKind {
  InvalidInput,
  NotPositiveDefinite,
  SingularInput,
  DimensionMismatch,
  InvalidParams,
  NumericalFailure,
  NotARotation,
  TargetUnreachable,
  NotOrthogonal,
  NegativeDeterminant,
  NonPositiveDeterminant,
  InvalidStep,
};

std::string_view to_string(ErrorKind kind);

// Every failure in the library is reported through this exception. The kind
// drives CLI exit codes; `achievable` is set only for TargetUnreachable and
// carries the largest rotation angle (radians) the scheme could reach.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<double> achievable = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<double> achievable() const noexcept { return achievable_; }

 private:
  ErrorKind kind_;
  std::optional<double> achievable_;
};

}  // namespace pdfactor
