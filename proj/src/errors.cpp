#include "nnqft/errors.hpp"

namespace nnqft {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config: return "configuration-error";
    case ErrorCode::UnsupportedOutputDim: return "unsupported-output-dim";
    case ErrorCode::InvalidVariance: return "invalid-variance";
    case ErrorCode::ReluRequiresZeroBias: return "relu-requires-zero-bias";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::DuplicateGridPoint: return "duplicate-grid-point";
    case ErrorCode::TooFewExperiments: return "too-few-experiments";
    case ErrorCode::WidthsNotIncreasing: return "widths-not-increasing";
    case ErrorCode::InvalidCount: return "invalid-count";
    case ErrorCode::NumericOverflow: return "numeric-overflow";
    case ErrorCode::Domain: return "domain-error";
    case ErrorCode::DegenerateInput: return "degenerate-input";
    case ErrorCode::OddArity: return "odd-arity";
    case ErrorCode::SizeLimit: return "size-limit";
    case ErrorCode::QuadratureNonConvergence: return "quadrature-nonconvergence";
    case ErrorCode::DegenerateMeasure: return "degenerate-measure";
    case ErrorCode::InsufficientSignal: return "insufficient-signal";
    case ErrorCode::InsufficientPoints: return "insufficient-points";
    case ErrorCode::CollinearFeatures: return "collinear-features";
    case ErrorCode::SnapshotMismatch: return "snapshot-mismatch";
    case ErrorCode::Io: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace nnqft
