#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <string>

#include "nnqft/config.hpp"

using namespace nnqft;
using Catch::Matchers::WithinAbs;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an nnqft::Error");
  return ErrorCode::Config;
}

ExperimentPlan gauss_plan() {
  ExperimentPlan plan;
  plan.widths = {2, 3, 4, 5, 10, 20, 50, 100, 500, 1000};
  plan.grid = builtin_grid(GridName::GaussDefault);
  return plan;
}

ArchitectureSpec gauss_spec() { return {Activation::Gauss, 1, 1, 10, 1.0, 1.0}; }

}  // namespace

TEST_CASE("builtin grids are the published inputs", "[config]") {
  const auto g = builtin_grid(GridName::GaussDefault);
  const std::vector<double> expect{-0.01, -0.006, -0.002, 0.002, 0.006, 0.01};
  REQUIRE(g.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(g.points[i] == Point{expect[i]});

  const auto d2 = builtin_grid(GridName::ReluD2);
  CHECK(d2.points == std::vector<Point>{{0.5, 0.5}, {0.5, 1.0}, {1.0, 0.5}, {1.0, 1.0}});
  const auto d3 = builtin_grid(GridName::ReluD3);
  CHECK(d3.dim() == 3);
  CHECK(d3.points[1] == Point{1.0, 1.0, 0.2});
  CHECK(builtin_grid(GridName::ErfDefault).points.back() == Point{0.012});
  CHECK(builtin_grid(GridName::ReluDefault).points.front() == Point{0.2});
}

TEST_CASE("train scaling multiplies by sqrt(2)/2", "[config]") {
  const auto t = builtin_grid("train:relu-default");
  CHECK_THAT(t.points[0][0], WithinAbs(0.2 * std::sqrt(2.0) / 2.0, 1e-15));
  CHECK_THAT(t.points[0][0], WithinAbs(0.141421356237, 1e-12));
  for (auto name : {GridName::GaussDefault, GridName::ReluD2, GridName::ReluD3}) {
    const auto base = builtin_grid(name);
    const auto scaled = train_scaled(base);
    for (std::size_t i = 0; i < base.points.size(); ++i) {
      double nb = 0.0, ns = 0.0;
      for (std::size_t a = 0; a < base.points[i].size(); ++a) {
        nb += base.points[i][a] * base.points[i][a];
        ns += scaled.points[i][a] * scaled.points[i][a];
      }
      CHECK_THAT(std::sqrt(ns), WithinAbs(std::sqrt(2.0) / 2.0 * std::sqrt(nb), 1e-15));
    }
  }
}

TEST_CASE("builtin_grid is deterministic and rejects unknown names", "[config]") {
  CHECK(builtin_grid("erf-default").points == builtin_grid("erf-default").points);
  CHECK(code_of([] { builtin_grid("nope"); }) == ErrorCode::Config);
}

TEST_CASE("validate accepts the Gauss plan", "[config]") {
  CHECK_NOTHROW(validate(gauss_plan(), gauss_spec()));
  CHECK(check(gauss_plan(), gauss_spec()).empty());
}

TEST_CASE("validate reports each invariant with its own code", "[config]") {
  auto spec = gauss_spec();
  auto plan = gauss_plan();

  auto relu = spec;
  relu.activation = Activation::ReLU;
  plan.grid = builtin_grid(GridName::ReluDefault);
  CHECK(code_of([&] { validate(plan, relu); }) == ErrorCode::ReluRequiresZeroBias);
  CHECK(std::string(to_string(ErrorCode::ReluRequiresZeroBias)) == "relu-requires-zero-bias");

  plan = gauss_plan();
  plan.grid = builtin_grid(GridName::ReluD2);
  CHECK(code_of([&] { validate(plan, spec); }) == ErrorCode::DimensionMismatch);

  plan = gauss_plan();
  auto out2 = spec;
  out2.d_out = 2;
  CHECK(code_of([&] { validate(plan, out2); }) == ErrorCode::UnsupportedOutputDim);

  auto bad_var = spec;
  bad_var.sigma_w_sq = 0.0;
  CHECK(code_of([&] { validate(plan, bad_var); }) == ErrorCode::InvalidVariance);
  bad_var = spec;
  bad_var.sigma_b_sq = std::nan("");
  CHECK(code_of([&] { validate(plan, bad_var); }) == ErrorCode::InvalidVariance);

  plan.n_experiments = 1;
  CHECK(code_of([&] { validate(plan, spec); }) == ErrorCode::TooFewExperiments);

  plan = gauss_plan();
  plan.widths = {5, 5};
  CHECK(code_of([&] { validate(plan, spec); }) == ErrorCode::WidthsNotIncreasing);

  plan = gauss_plan();
  plan.grid.points.push_back(plan.grid.points.front());
  CHECK(code_of([&] { validate(plan, spec); }) == ErrorCode::DuplicateGridPoint);
}

TEST_CASE("check collects every violation", "[config]") {
  auto spec = gauss_spec();
  spec.activation = Activation::ReLU;
  spec.d_out = 3;
  auto plan = gauss_plan();
  plan.n_experiments = 1;
  plan.grid = builtin_grid(GridName::ReluDefault);
  const auto issues = check(plan, spec);
  REQUIRE(issues.size() == 3);
  CHECK(issues[0].code == ErrorCode::UnsupportedOutputDim);
  CHECK(issues[1].code == ErrorCode::ReluRequiresZeroBias);
  CHECK(issues[2].code == ErrorCode::TooFewExperiments);
}

TEST_CASE("config documents parse into plan, spec and analysis", "[config]") {
  const char* text = R"({
    "schema_version": 1,
    "architecture": {"activation": "relu", "d_in": 2, "sigma_w_sq": 1.0, "sigma_b_sq": 0.0},
    "plan": {"n_experiments": 4, "nets_per_experiment": 100, "widths": [20],
             "seed": "18446744073709551615", "grid": "relu-d2"},
    "analysis": {"cutoff": 1000, "cutoffs": [7, 10, "inf"], "quad_points": 24}
  })";
  const auto cfg = parse_config(text);
  CHECK(cfg.arch.activation == Activation::ReLU);
  CHECK(cfg.arch.d_in == 2);
  CHECK(cfg.plan.seed == 18446744073709551615ULL);
  CHECK(cfg.plan.grid.label == "relu-d2");
  CHECK(cfg.analysis.cutoff == 1000.0);
  CHECK(std::isinf(cfg.analysis.cutoffs.back()));
  CHECK(cfg.analysis.quad_points == 24);
  CHECK(cfg.hash == parse_config(text).hash);
  CHECK(cfg.hash != 0);
}

TEST_CASE("config defaults the cutoff per activation", "[config]") {
  const char* text = R"({"schema_version": 1,
    "architecture": {"activation": "gauss", "sigma_w_sq": 1, "sigma_b_sq": 1},
    "plan": {"widths": [10], "seed": 1, "grid": {"label": "mine", "points": [0.1, 0.2]}}})";
  const auto cfg = parse_config(text);
  CHECK(std::isinf(cfg.analysis.cutoff));
  CHECK(cfg.plan.grid.points == std::vector<Point>{{0.1}, {0.2}});
  CHECK(default_cutoff(Activation::Erf) == 1e5);
}

TEST_CASE("malformed configs are configuration errors", "[config]") {
  CHECK(code_of([] { parse_config("{"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse_config(R"({"schema_version": 2})"); }) == ErrorCode::Config);
  CHECK(code_of([] {
          parse_config(R"({"schema_version": 1, "architecture": {"activation": "tanh"},
                           "plan": {"widths": [1], "seed": 1, "grid": "gauss-default"}})");
        }) == ErrorCode::Config);
  CHECK(code_of([] { load_config("/nonexistent/config.json"); }) == ErrorCode::Io);
}

TEST_CASE("run-size presets", "[config]") {
  ExperimentPlan plan;
  apply_paper_scale(plan);
  CHECK(plan.n_experiments == 100);
  CHECK(plan.nets_per_experiment == 100'000);
  apply_desk_scale(plan);
  CHECK(plan.n_experiments == 20);
  CHECK(plan.nets_per_experiment == 50'000);
}
