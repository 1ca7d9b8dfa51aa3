#include "partisan/common/error.hpp"

namespace partisan {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::UnknownCounty: return "UnknownCounty";
    case ErrorCode::MissingObservation: return "MissingObservation";
    case ErrorCode::Tie: return "Tie";
    case ErrorCode::EmptyJoin: return "EmptyJoin";
    case ErrorCode::IsolatedCounty: return "IsolatedCounty";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::Convergence: return "Convergence";
    case ErrorCode::NumericalError: return "NumericalError";
    case ErrorCode::TooManyPredictors: return "TooManyPredictors";
    case ErrorCode::TooManyFeatures: return "TooManyFeatures";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::InfiniteVif: return "InfiniteVif";
    case ErrorCode::IncompleteRun: return "IncompleteRun";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

int error_exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Convergence:
    case ErrorCode::NumericalError:
    case ErrorCode::SingularDesign:
      return 2;
    default:
      return 1;
  }
}

}  // namespace partisan
