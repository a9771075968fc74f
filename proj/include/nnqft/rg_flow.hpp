#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnqft/eft.hpp"

namespace nnqft {

struct SweepPoint {
  double cutoff = 0.0;
  double lambda_bar = 0.0;
  double rel_spread = 0.0;
  std::optional<std::string> error;  // set when extraction failed at this cutoff
};

struct SweepResult {
  Activation activation = Activation::ReLU;
  int width = 0;
  int d_in = 1;
  std::vector<SweepPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double theory_slope = 0.0;
};

/// Re-extracts lambda_m from one empirical G4 at every cutoff. Cutoffs must
/// be finite and strictly increasing. Extraction errors are recorded per
/// point rather than thrown.
SweepResult cutoff_sweep(const SymmetricTensor& g4, const KernelModel& kernel,
                         const InputGrid& grid, std::span<const double> cutoffs,
                         const QuadratureSpec& quad);

struct RgFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_ = 0.0;
  int points = 0;
};

/// Least squares of log |lambda_bar| on log cutoff over valid points with
/// cutoff >= min_cutoff. Throws InsufficientPoints with fewer than 4.
RgFit fit_rg_slope(const SweepResult& sweep, double min_cutoff);

/// Fits and stores slope, intercept and standard error in the sweep.
void apply_fit(SweepResult& sweep, double min_cutoff);

/// -(d_in + 4), for d_in in 1..3.
double beta_theory_relu(int d_in);

/// Scaling dimension -d_in - k [K] / 2 of a coupling with k legs.
double coupling_dimension(double kernel_dim, int k, int d_in);

/// The ReLU large-cutoff experiment list.
std::vector<double> default_rg_cutoffs();

}  // namespace nnqft
