#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace orthant {

enum class ErrorCode {
  ParseError,
  NotSymmetric,
  NotPositiveDefinite,
  DimensionTooLarge,
  InvalidArgument,
  SingularSubmatrix,
  NonNegativeDiagonal,
  MaxStepsExceeded,
  StepUnderflow,
  NonFiniteState,
  InvalidRho,
  InvalidVariance,
  TooHighDimension,
  OracleInapplicable,
};

std::string_view to_string(ErrorCode code);

/// Numerical failures (integration, factorization of submatrices) are
/// distinguished from input failures so the CLI can map them to exit codes.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace orthant
