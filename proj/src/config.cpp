#include "nnqft/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nnqft {

using nlohmann::json;

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::Erf: return "erf";
    case Activation::ReLU: return "relu";
    case Activation::Gauss: return "gauss";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "erf") return Activation::Erf;
  if (name == "relu") return Activation::ReLU;
  if (name == "gauss") return Activation::Gauss;
  throw Error(ErrorCode::Config, "unknown activation '" + std::string(name) + "'");
}

double InputGrid::max_norm() const {
  double best = 0.0;
  for (const auto& p : points) {
    double sq = 0.0;
    for (double v : p) sq += v * v;
    best = std::max(best, std::sqrt(sq));
  }
  return best;
}

namespace {

InputGrid scalar_grid(std::initializer_list<double> values, std::string label) {
  InputGrid grid;
  grid.label = std::move(label);
  for (double v : values) grid.points.push_back({v});
  return grid;
}

}  // namespace

InputGrid builtin_grid(GridName name) {
  switch (name) {
    case GridName::GaussDefault:
      return scalar_grid({-0.01, -0.006, -0.002, 0.002, 0.006, 0.01}, "gauss-default");
    case GridName::ErfDefault:
      return scalar_grid({0.002, 0.004, 0.006, 0.008, 0.010, 0.012}, "erf-default");
    case GridName::ReluDefault:
      return scalar_grid({0.2, 0.4, 0.6, 0.8, 1.0, 1.2}, "relu-default");
    case GridName::ReluD2:
      return InputGrid{{{0.5, 0.5}, {0.5, 1.0}, {1.0, 0.5}, {1.0, 1.0}}, "relu-d2"};
    case GridName::ReluD3:
      return InputGrid{{{0.2, 0.2, 0.2}, {1.0, 1.0, 0.2}, {0.2, 1.0, 1.0}, {1.0, 0.2, 1.0}},
                       "relu-d3"};
  }
  throw Error(ErrorCode::Config, "unknown grid");
}

InputGrid train_scaled(const InputGrid& base) {
  const double factor = std::sqrt(2.0) / 2.0;
  InputGrid out;
  out.label = "train:" + base.label;
  out.points.reserve(base.points.size());
  for (const auto& p : base.points) {
    Point q(p.size());
    std::transform(p.begin(), p.end(), q.begin(), [&](double v) { return v * factor; });
    out.points.push_back(std::move(q));
  }
  return out;
}

InputGrid builtin_grid(std::string_view name) {
  constexpr std::string_view prefix = "train:";
  if (name.substr(0, prefix.size()) == prefix) {
    return train_scaled(builtin_grid(name.substr(prefix.size())));
  }
  if (name == "gauss-default") return builtin_grid(GridName::GaussDefault);
  if (name == "erf-default") return builtin_grid(GridName::ErfDefault);
  if (name == "relu-default") return builtin_grid(GridName::ReluDefault);
  if (name == "relu-d2") return builtin_grid(GridName::ReluD2);
  if (name == "relu-d3") return builtin_grid(GridName::ReluD3);
  throw Error(ErrorCode::Config, "unknown grid '" + std::string(name) + "'");
}

std::vector<ValidationIssue> check(const ArchitectureSpec& spec) {
  std::vector<ValidationIssue> issues;
  if (spec.d_out != 1) {
    issues.push_back({ErrorCode::UnsupportedOutputDim, "d_out must be 1"});
  }
  if (spec.d_in < 1) {
    issues.push_back({ErrorCode::DimensionMismatch, "d_in must be positive"});
  }
  if (spec.width < 1) {
    issues.push_back({ErrorCode::InvalidCount, "width must be positive"});
  }
  if (!std::isfinite(spec.sigma_w_sq) || spec.sigma_w_sq <= 0.0) {
    issues.push_back({ErrorCode::InvalidVariance, "sigma_w_sq must be finite and > 0"});
  }
  if (!std::isfinite(spec.sigma_b_sq) || spec.sigma_b_sq < 0.0) {
    issues.push_back({ErrorCode::InvalidVariance, "sigma_b_sq must be finite and >= 0"});
  }
  if (spec.mean_w != 0.0 || spec.mean_b != 0.0) {
    issues.push_back({ErrorCode::Config, "weight and bias means are fixed at 0"});
  }
  if (spec.activation == Activation::ReLU && spec.sigma_b_sq != 0.0) {
    issues.push_back({ErrorCode::ReluRequiresZeroBias, "relu networks require sigma_b_sq = 0"});
  }
  return issues;
}

std::vector<ValidationIssue> check(const InputGrid& grid, int d_in) {
  std::vector<ValidationIssue> issues;
  if (grid.points.empty()) {
    issues.push_back({ErrorCode::Config, "grid '" + grid.label + "' is empty"});
    return issues;
  }
  for (const auto& p : grid.points) {
    if (static_cast<int>(p.size()) != d_in) {
      issues.push_back({ErrorCode::DimensionMismatch,
                        "grid '" + grid.label + "' has a point of dimension " +
                            std::to_string(p.size()) + ", expected " + std::to_string(d_in)});
      break;
    }
  }
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.points.size(); ++j) {
      if (grid.points[i] == grid.points[j]) {
        issues.push_back({ErrorCode::DuplicateGridPoint,
                          "grid points " + std::to_string(i) + " and " + std::to_string(j) +
                              " coincide"});
        return issues;
      }
    }
  }
  return issues;
}

std::vector<ValidationIssue> check(const ExperimentPlan& plan, const ArchitectureSpec& spec) {
  auto issues = check(spec);
  auto grid_issues = check(plan.grid, spec.d_in);
  issues.insert(issues.end(), grid_issues.begin(), grid_issues.end());
  if (plan.n_experiments < 2) {
    issues.push_back({ErrorCode::TooFewExperiments, "n_experiments must be >= 2"});
  }
  if (plan.nets_per_experiment < 1) {
    issues.push_back({ErrorCode::InvalidCount, "nets_per_experiment must be positive"});
  }
  for (std::size_t i = 0; i < plan.widths.size(); ++i) {
    if (plan.widths[i] < 1) {
      issues.push_back({ErrorCode::InvalidCount, "widths must be positive"});
      break;
    }
    if (i > 0 && plan.widths[i] <= plan.widths[i - 1]) {
      issues.push_back({ErrorCode::WidthsNotIncreasing, "widths must be strictly increasing"});
      break;
    }
  }
  return issues;
}

namespace {

[[noreturn]] void raise(const std::vector<ValidationIssue>& issues) {
  std::string message;
  for (const auto& issue : issues) {
    if (!message.empty()) message += "; ";
    message += std::string(to_string(issue.code)) + " (" + issue.message + ")";
  }
  throw Error(issues.front().code, message);
}

}  // namespace

void validate(const ExperimentPlan& plan, const ArchitectureSpec& spec) {
  auto issues = check(plan, spec);
  if (!issues.empty()) raise(issues);
}

void validate(const ArchitectureSpec& spec) {
  auto issues = check(spec);
  if (!issues.empty()) raise(issues);
}

void apply_desk_scale(ExperimentPlan& plan) {
  plan.n_experiments = 20;
  plan.nets_per_experiment = 50'000;
}

void apply_paper_scale(ExperimentPlan& plan) {
  plan.n_experiments = 100;
  plan.nets_per_experiment = 100'000;
}

double default_cutoff(Activation a) {
  return a == Activation::Gauss ? kInfiniteCutoff : 1e5;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

InputGrid parse_grid(const json& node) {
  if (node.is_string()) return builtin_grid(node.get<std::string>());
  if (!node.is_object() || !node.contains("points")) {
    throw Error(ErrorCode::Config, "grid must be a builtin name or {label, points}");
  }
  InputGrid grid;
  grid.label = node.value("label", std::string("custom"));
  for (const auto& p : node.at("points")) {
    if (p.is_number()) {
      grid.points.push_back({p.get<double>()});
    } else {
      grid.points.push_back(p.get<std::vector<double>>());
    }
  }
  return grid;
}

double parse_cutoff(const json& node) {
  if (node.is_string()) {
    auto s = node.get<std::string>();
    if (s == "inf" || s == "infinity") return kInfiniteCutoff;
    throw Error(ErrorCode::Config, "cutoff must be a number or \"inf\"");
  }
  double v = node.get<double>();
  if (!(v > 0.0)) throw Error(ErrorCode::Config, "cutoff must be positive");
  return v;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, std::string("malformed config: ") + e.what());
  }
  try {
    ExperimentConfig cfg;
    if (doc.value("schema_version", 0) != ExperimentConfig::kSchemaVersion) {
      throw Error(ErrorCode::Config, "unsupported schema_version (expected 1)");
    }
    const auto& arch = doc.at("architecture");
    cfg.arch.activation = parse_activation(arch.at("activation").get<std::string>());
    cfg.arch.d_in = arch.value("d_in", 1);
    cfg.arch.d_out = arch.value("d_out", 1);
    cfg.arch.sigma_w_sq = arch.value("sigma_w_sq", 1.0);
    cfg.arch.sigma_b_sq = arch.value("sigma_b_sq", 0.0);
    cfg.arch.mean_w = arch.value("mean_w", 0.0);
    cfg.arch.mean_b = arch.value("mean_b", 0.0);

    const auto& plan = doc.at("plan");
    cfg.plan.n_experiments = plan.value("n_experiments", 20);
    cfg.plan.nets_per_experiment = plan.value("nets_per_experiment", std::int64_t{50'000});
    cfg.plan.widths = plan.at("widths").get<std::vector<int>>();
    const auto& seed = plan.at("seed");
    cfg.plan.seed = seed.is_string() ? std::stoull(seed.get<std::string>())
                                     : seed.get<std::uint64_t>();
    cfg.plan.grid = parse_grid(plan.at("grid"));
    cfg.arch.width = cfg.plan.widths.empty() ? 1 : cfg.plan.widths.front();

    if (doc.contains("analysis")) {
      const auto& a = doc.at("analysis");
      cfg.analysis.eft_width = a.value("eft_width", 0);
      cfg.analysis.cutoff = a.contains("cutoff") ? parse_cutoff(a.at("cutoff"))
                                                 : default_cutoff(cfg.arch.activation);
      if (a.contains("cutoffs")) {
        for (const auto& c : a.at("cutoffs")) cfg.analysis.cutoffs.push_back(parse_cutoff(c));
      }
      cfg.analysis.rg_min_cutoff = a.value("rg_min_cutoff", 1e3);
      cfg.analysis.quad_points = a.value("quad_points", 0);
      cfg.analysis.quad_tolerance = a.value("quad_tolerance", 1e-6);
      if (a.contains("train_grid")) cfg.analysis.train_grid = parse_grid(a.at("train_grid"));
    } else {
      cfg.analysis.cutoff = default_cutoff(cfg.arch.activation);
    }
    cfg.hash = fnv1a64(doc.dump());
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("invalid config field: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace nnqft
