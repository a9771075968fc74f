#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nnqft {

enum class ErrorCode {
  Config,
  UnsupportedOutputDim,
  InvalidVariance,
  ReluRequiresZeroBias,
  DimensionMismatch,
  DuplicateGridPoint,
  TooFewExperiments,
  WidthsNotIncreasing,
  InvalidCount,
  NumericOverflow,
  Domain,
  DegenerateInput,
  OddArity,
  SizeLimit,
  QuadratureNonConvergence,
  DegenerateMeasure,
  InsufficientSignal,
  InsufficientPoints,
  CollinearFeatures,
  SnapshotMismatch,
  Io,
};

/// Stable machine-readable name, e.g. "relu-requires-zero-bias".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when successive refinement does not settle; carries the last
/// estimate and the last observed relative change.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& message, double last_estimate, double residual)
      : Error(ErrorCode::QuadratureNonConvergence, message),
        last_estimate_(last_estimate),
        residual_(residual) {}

  double last_estimate() const noexcept { return last_estimate_; }
  double residual() const noexcept { return residual_; }

 private:
  double last_estimate_;
  double residual_;
};

}  // namespace nnqft
