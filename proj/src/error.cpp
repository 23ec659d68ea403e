#include "orthant/error.hpp"

namespace orthant {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingularSubmatrix: return "SingularSubmatrix";
    case ErrorCode::NonNegativeDiagonal: return "NonNegativeDiagonal";
    case ErrorCode::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::InvalidRho: return "InvalidRho";
    case ErrorCode::InvalidVariance: return "InvalidVariance";
    case ErrorCode::TooHighDimension: return "TooHighDimension";
    case ErrorCode::OracleInapplicable: return "OracleInapplicable";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularSubmatrix:
    case ErrorCode::NonNegativeDiagonal:
    case ErrorCode::MaxStepsExceeded:
    case ErrorCode::StepUnderflow:
    case ErrorCode::NonFiniteState:
      return true;
    default:
      return false;
  }
}

}  // namespace orthant
