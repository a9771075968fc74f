#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nnqft/errors.hpp"

namespace nnqft {

enum class Activation { Erf, ReLU, Gauss };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

/// Single-hidden-layer network family. First-layer weights are drawn with
/// variance sigma_w_sq / d_in, output weights with sigma_w_sq / width, and
/// both bias layers share sigma_b_sq.
struct ArchitectureSpec {
  Activation activation = Activation::Gauss;
  int d_in = 1;
  int d_out = 1;
  int width = 1;
  double sigma_w_sq = 1.0;
  double sigma_b_sq = 0.0;
  double mean_w = 0.0;
  double mean_b = 0.0;

  ArchitectureSpec with_width(int n) const {
    ArchitectureSpec copy = *this;
    copy.width = n;
    return copy;
  }
};

using Point = std::vector<double>;

struct InputGrid {
  std::vector<Point> points;
  std::string label;

  int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
  int size() const { return static_cast<int>(points.size()); }
  double max_norm() const;
};

enum class GridName { GaussDefault, ErfDefault, ReluDefault, ReluD2, ReluD3 };

InputGrid builtin_grid(GridName name);

/// Every point of `base` multiplied by sqrt(2)/2; the label gets a "train:" prefix.
InputGrid train_scaled(const InputGrid& base);

/// Resolves "gauss-default", "erf-default", "relu-default", "relu-d2",
/// "relu-d3", or "train:<name>" for the scaled variant.
InputGrid builtin_grid(std::string_view name);

struct ExperimentPlan {
  int n_experiments = 20;
  std::int64_t nets_per_experiment = 50'000;
  std::vector<int> widths;
  std::uint64_t seed = 0;
  InputGrid grid;
};

struct ValidationIssue {
  ErrorCode code;
  std::string message;
};

/// All violated invariants, in a fixed order. Empty means valid.
std::vector<ValidationIssue> check(const ExperimentPlan& plan, const ArchitectureSpec& spec);
std::vector<ValidationIssue> check(const ArchitectureSpec& spec);
std::vector<ValidationIssue> check(const InputGrid& grid, int d_in);

/// Throws an Error carrying the first issue's code; the message lists all issues.
void validate(const ExperimentPlan& plan, const ArchitectureSpec& spec);
void validate(const ArchitectureSpec& spec);

constexpr double kInfiniteCutoff = std::numeric_limits<double>::infinity();

/// Analysis knobs that ride along in the config file.
struct AnalysisSettings {
  int eft_width = 0;  // 0 selects the largest sampled width
  double cutoff = kInfiniteCutoff;
  std::vector<double> cutoffs;
  double rg_min_cutoff = 1e3;
  int quad_points = 0;         // 0 selects the per-dimension default
  double quad_tolerance = 1e-6;
  std::optional<InputGrid> train_grid;
};

struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;

  ArchitectureSpec arch;
  ExperimentPlan plan;
  AnalysisSettings analysis;
  std::uint64_t hash = 0;  // FNV-1a over the canonical form of the parsed document
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Desk-scale run sizes (20 x 5e4) and the original ones (100 x 1e5).
void apply_desk_scale(ExperimentPlan& plan);
void apply_paper_scale(ExperimentPlan& plan);

/// Default cutoff for fixed-cutoff analyses: infinite for Gauss, 1e5 otherwise.
double default_cutoff(Activation a);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace nnqft
