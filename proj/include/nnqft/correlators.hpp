#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nnqft/kernels.hpp"
#include "nnqft/sampler.hpp"
#include "nnqft/symmetric_tensor.hpp"

namespace nnqft {

/// Estimated n-point function over a grid: one tensor per experiment plus
/// their mean.
struct CorrelationTensor {
  int order = 0;
  int grid_size = 0;
  std::int64_t count_per_experiment = 0;
  std::vector<SymmetricTensor> experiments;
  SymmetricTensor pooled;

  int n_experiments() const { return static_cast<int>(experiments.size()); }

  /// Across-experiment sample standard deviation, elementwise.
  SymmetricTensor std_dev() const;
};

/// Orders 1..6. Throws Config when the accumulators disagree on grid size or
/// count, InvalidCount when any is empty.
CorrelationTensor empirical_npt(std::span<const MomentAccumulator> acc, int order);

/// Builds a CorrelationTensor from per-experiment tensors (synthetic data,
/// derived quantities).
CorrelationTensor from_experiments(std::vector<SymmetricTensor> experiments,
                                   std::int64_t count_per_experiment);

struct DeviationReport {
  int order = 0;
  SymmetricTensor gp;
  SymmetricTensor delta;   // pooled G - G_GP
  SymmetricTensor m;       // pooled delta / G_GP
  SymmetricTensor m_std;   // across-experiment std of m
  SymmetricTensor ci_low;  // m -+ 1.96 m_std / sqrt(n_experiments)
  SymmetricTensor ci_high;
  std::vector<bool> degenerate;  // G_GP element was 0
  double background = 0.0;       // mean of m_std over non-degenerate elements
  double mean_abs_m = 0.0;       // mean of |m| over non-degenerate elements
};

DeviationReport deviation(const CorrelationTensor& emp, const SymmetricTensor& gp);
DeviationReport deviation(const CorrelationTensor& emp, const KernelModel& kernel,
                          const InputGrid& grid);

/// G4 minus its three disconnected products, with the analytic G2.
SymmetricTensor connected4(const SymmetricTensor& g4, const SymmetricTensor& g2);

/// Applies connected4 to each experiment and to the pooled tensor.
CorrelationTensor connected4(const CorrelationTensor& emp4, const SymmetricTensor& g2);

/// G6 minus the 15 products of connected G4 with G2 and the 15 triple G2
/// products.
SymmetricTensor connected6(const SymmetricTensor& g6, const SymmetricTensor& g4,
                           const SymmetricTensor& g2);
CorrelationTensor connected6(const CorrelationTensor& emp6, const CorrelationTensor& emp4,
                             const SymmetricTensor& g2);

/// sqrt(dG6^2 + (G2 dG4)^2) summed over the 15 ways the 4-point error enters
/// with its spectator G2, elementwise; and its mean.
SymmetricTensor g6_connected_background_tensor(const SymmetricTensor& dg6_std,
                                               const SymmetricTensor& dg4_std,
                                               const SymmetricTensor& g2);
double g6_connected_background(const SymmetricTensor& dg6_std, const SymmetricTensor& dg4_std,
                               const SymmetricTensor& g2);

/// Scalar form for one element: sqrt(dg6^2 + (g2 * dg4)^2).
double g6_connected_background(double dg6_std, double dg4_std, double g2);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

/// Least squares on (log n, log |value|) over entries with mask set. Throws
/// InsufficientSignal with fewer than 3 such entries.
SlopeFit scaling_slope(std::span<const double> n, std::span<const double> value,
                       std::span<const bool> mask);
SlopeFit scaling_slope(std::span<const double> n, std::span<const double> value);

}  // namespace nnqft
