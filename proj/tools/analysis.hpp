#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nnqft/config.hpp"
#include "nnqft/correlators.hpp"
#include "nnqft/coupling_fit.hpp"
#include "nnqft/eft.hpp"
#include "nnqft/rg_flow.hpp"
#include "nnqft/sampler.hpp"

// Stage logic shared by the command-line tool and the acceptance runner.
namespace nnqft::app {

/// Per-dimension default rule with the config's point count and tolerance.
QuadratureSpec quadrature_for(const KernelModel& kernel, const InputGrid& grid,
                              const AnalysisSettings& settings);

/// Samples one width over `grid` with the plan's seed and sizes.
std::vector<MomentAccumulator> sample(const ExperimentConfig& cfg, int width,
                                      const InputGrid& grid, const EnsembleOptions& options);

/// Deviation measures of one width. Index 0, 1, 2 hold orders 2, 4, 6.
struct WidthStats {
  int width = 0;
  std::array<double, 3> mean_abs_m{};
  std::array<double, 3> background{};
  double g6_conn = 0.0;             // mean |connected G6 / GP6|
  double g6_conn_background = 0.0;  // mean propagated background / |GP6|
};

WidthStats width_stats(const KernelModel& kernel, const InputGrid& grid,
                       const std::vector<MomentAccumulator>& acc);

struct ScalingSummary {
  std::optional<SlopeFit> g4;
  std::optional<SlopeFit> g6;
  std::optional<SlopeFit> g6_conn;
  bool m2_below_background = true;
};

/// Slopes over widths where the signal exceeds its background; a slope is
/// absent when fewer than three widths qualify.
ScalingSummary scaling(const std::vector<WidthStats>& stats);

struct LambdaResult {
  double cutoff = 0.0;
  SymmetricTensor gram;
  SymmetricTensor vertex4;
  SymmetricTensor lambda_m;
  double lambda_bar = 0.0;
  double rel_spread = 0.0;
};

LambdaResult extract_lambda(const KernelModel& kernel, const InputGrid& grid,
                            const std::vector<MomentAccumulator>& acc, double cutoff,
                            const QuadratureSpec& quad);

struct G6Result {
  SymmetricTensor g6;
  SymmetricTensor gp;
  SymmetricTensor prediction;
  Delta6 delta;
  Delta6 delta_gp;
  double closer_fraction = 0.0;   // prediction strictly closer to G6 than GP
  double in_band_fraction = 0.0;  // prediction / G6 within [0.9, 1.1]
};

G6Result predict_g6(const LambdaResult& lambda, const std::vector<MomentAccumulator>& acc);

/// Measured G4 - GP4 pooled over experiments.
SymmetricTensor measured_dg4(const KernelModel& kernel, const InputGrid& grid,
                             const std::vector<MomentAccumulator>& acc);

struct FitInputs {
  SymmetricTensor train_dg4;
  FeatureTensors train;
  SymmetricTensor test_dg4;
  FeatureTensors test;
};

FitInputs fit_inputs(const KernelModel& kernel, const InputGrid& train_grid,
                     const std::vector<MomentAccumulator>& train_acc, const InputGrid& test_grid,
                     const std::vector<MomentAccumulator>& test_acc, double cutoff,
                     const AnalysisSettings& settings);

FitReport fit_and_evaluate(FitModel model, const FitInputs& in);

/// The config's train grid, or the test grid scaled by sqrt(2)/2.
InputGrid train_grid(const ExperimentConfig& cfg);

/// Width used for fixed-width analyses.
int eft_width(const ExperimentConfig& cfg);

/// Cutoff for fixed-cutoff analyses.
double analysis_cutoff(const ExperimentConfig& cfg);

/// Cutoffs for the flow sweep and the lower bound of its fit.
std::vector<double> sweep_cutoffs(const ExperimentConfig& cfg);
double sweep_min_cutoff(const ExperimentConfig& cfg);

}  // namespace nnqft::app
