#pragma once

#include <stdexcept>
#include <string>

namespace partisan {

enum class ErrorCode {
  Validation,
  DuplicateKey,
  UnknownCounty,
  MissingObservation,
  Tie,
  EmptyJoin,
  IsolatedCounty,
  DivisionByZero,
  Degenerate,
  SingularDesign,
  Convergence,
  NumericalError,
  TooManyPredictors,
  TooManyFeatures,
  DegenerateVariance,
  InfiniteVif,
  IncompleteRun,
  Io,
};

const char* error_code_name(ErrorCode code);

// Process exit code contract: 1 for validation-class errors, 2 for
// numerical/convergence failures.
int error_exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const { return code_; }
  int exit_code() const { return error_exit_code(code_); }
  // Message without the code-name prefix, for rewrapping.
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace partisan
