#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "nnqft/wick.hpp"

namespace nnqft::app {

QuadratureSpec quadrature_for(const KernelModel& kernel, const InputGrid& grid,
                              const AnalysisSettings& settings) {
  auto q = default_quadrature(kernel, grid);
  if (settings.quad_points > 0) q.points = settings.quad_points;
  q.tolerance = settings.quad_tolerance;
  return q;
}

std::vector<MomentAccumulator> sample(const ExperimentConfig& cfg, int width,
                                      const InputGrid& grid, const EnsembleOptions& options) {
  ExperimentPlan plan = cfg.plan;
  plan.grid = grid;
  const auto spec = cfg.arch.with_width(width);
  validate(plan, spec);
  return run_ensemble(plan, spec, width, options);
}

WidthStats width_stats(const KernelModel& kernel, const InputGrid& grid,
                       const std::vector<MomentAccumulator>& acc) {
  WidthStats s;
  s.width = kernel.spec().width;
  const auto gram = kernel.gram(grid);
  const std::array<int, 3> orders{2, 4, 6};
  for (int k = 0; k < 3; ++k) {
    const auto rep = deviation(empirical_npt(acc, orders[k]), gp_tensor(gram, orders[k]));
    s.mean_abs_m[k] = rep.mean_abs_m;
    s.background[k] = rep.background;
  }

  const auto emp4 = empirical_npt(acc, 4);
  const auto emp6 = empirical_npt(acc, 6);
  const auto c6 = connected6(emp6, emp4, gram);
  const auto bg = g6_connected_background_tensor(emp6.std_dev(), emp4.std_dev(), gram);
  const auto gp6 = gp_tensor(gram, 6);
  double sig = 0.0, back = 0.0;
  int used = 0;
  for (std::size_t m = 0; m < gp6.size(); ++m) {
    if (gp6[m] == 0.0) continue;
    sig += std::abs(c6.pooled[m] / gp6[m]);
    back += bg[m] / std::abs(gp6[m]);
    ++used;
  }
  if (used > 0) {
    s.g6_conn = sig / used;
    s.g6_conn_background = back / used;
  }
  return s;
}

namespace {

std::optional<SlopeFit> masked_slope(const std::vector<double>& n, const std::vector<double>& v,
                                     const std::vector<double>& bg) {
  std::unique_ptr<bool[]> mask(new bool[n.size()]);
  for (std::size_t i = 0; i < n.size(); ++i) mask[i] = v[i] > bg[i];
  try {
    return scaling_slope(n, v, std::span<const bool>(mask.get(), n.size()));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InsufficientSignal) return std::nullopt;
    throw;
  }
}

}  // namespace

ScalingSummary scaling(const std::vector<WidthStats>& stats) {
  std::vector<double> n, m4, b4, m6, b6, c6, bc6;
  ScalingSummary out;
  for (const auto& s : stats) {
    n.push_back(s.width);
    m4.push_back(s.mean_abs_m[1]);
    b4.push_back(s.background[1]);
    m6.push_back(s.mean_abs_m[2]);
    b6.push_back(s.background[2]);
    c6.push_back(s.g6_conn);
    bc6.push_back(s.g6_conn_background);
    if (s.mean_abs_m[0] > s.background[0]) out.m2_below_background = false;
  }
  out.g4 = masked_slope(n, m4, b4);
  out.g6 = masked_slope(n, m6, b6);
  out.g6_conn = masked_slope(n, c6, bc6);
  return out;
}

LambdaResult extract_lambda(const KernelModel& kernel, const InputGrid& grid,
                            const std::vector<MomentAccumulator>& acc, double cutoff,
                            const QuadratureSpec& quad) {
  LambdaResult r;
  r.cutoff = cutoff;
  r.gram = kernel.gram(grid);
  r.vertex4 = vertex_tensor(kernel, grid, 4, VertexWeight::One, cutoff, quad);
  r.lambda_m = extract_lambda_m(empirical_npt(acc, 4).pooled, r.gram, r.vertex4);
  r.lambda_bar = lambda_bar(r.lambda_m);
  r.rel_spread = lambda_rel_spread(r.lambda_m);
  return r;
}

G6Result predict_g6(const LambdaResult& lambda, const std::vector<MomentAccumulator>& acc) {
  G6Result r;
  r.g6 = empirical_npt(acc, 6).pooled;
  r.gp = gp_tensor(lambda.gram, 6);
  r.prediction = predict_g6_tensor(lambda.gram, lambda.vertex4, lambda.lambda_bar);
  r.delta = delta6(r.g6, r.prediction);
  r.delta_gp = delta6(r.g6, r.gp);
  int closer = 0, band = 0, used = 0;
  for (std::size_t m = 0; m < r.g6.size(); ++m) {
    if (r.g6[m] == 0.0) continue;
    ++used;
    const double ratio = r.prediction[m] / r.g6[m];
    if (ratio >= 0.9 && ratio <= 1.1) ++band;
    if (std::abs(r.prediction[m] - r.g6[m]) < std::abs(r.gp[m] - r.g6[m])) ++closer;
  }
  if (used > 0) {
    r.closer_fraction = static_cast<double>(closer) / used;
    r.in_band_fraction = static_cast<double>(band) / used;
  }
  return r;
}

SymmetricTensor measured_dg4(const KernelModel& kernel, const InputGrid& grid,
                             const std::vector<MomentAccumulator>& acc) {
  const auto gp4 = gp_tensor(kernel.gram(grid), 4);
  return SymmetricTensor::zip(empirical_npt(acc, 4).pooled, gp4,
                              [](double g, double gp) { return g - gp; });
}

FitInputs fit_inputs(const KernelModel& kernel, const InputGrid& train_grid,
                     const std::vector<MomentAccumulator>& train_acc, const InputGrid& test_grid,
                     const std::vector<MomentAccumulator>& test_acc, double cutoff,
                     const AnalysisSettings& settings) {
  FitInputs in;
  in.train_dg4 = measured_dg4(kernel, train_grid, train_acc);
  in.test_dg4 = measured_dg4(kernel, test_grid, test_acc);
  in.train = build_features(kernel, train_grid, cutoff,
                            quadrature_for(kernel, train_grid, settings));
  in.test = build_features(kernel, test_grid, cutoff, quadrature_for(kernel, test_grid, settings));
  return in;
}

FitReport fit_and_evaluate(FitModel model, const FitInputs& in) {
  auto r = fit_model(model, in.train_dg4, in.train);
  apply_evaluation(r, evaluate(r, in.test_dg4, in.test));
  return r;
}

InputGrid train_grid(const ExperimentConfig& cfg) {
  return cfg.analysis.train_grid ? *cfg.analysis.train_grid : train_scaled(cfg.plan.grid);
}

int eft_width(const ExperimentConfig& cfg) {
  if (cfg.analysis.eft_width > 0) return cfg.analysis.eft_width;
  if (cfg.plan.widths.empty()) throw Error(ErrorCode::Config, "plan has no widths");
  return *std::max_element(cfg.plan.widths.begin(), cfg.plan.widths.end());
}

double analysis_cutoff(const ExperimentConfig& cfg) { return cfg.analysis.cutoff; }

std::vector<double> sweep_cutoffs(const ExperimentConfig& cfg) {
  if (!cfg.analysis.cutoffs.empty()) return cfg.analysis.cutoffs;
  return default_rg_cutoffs();
}

double sweep_min_cutoff(const ExperimentConfig& cfg) { return cfg.analysis.rg_min_cutoff; }

}  // namespace nnqft::app
