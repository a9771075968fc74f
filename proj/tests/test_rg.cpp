#include <catch_amalgamated.hpp>

#include <cmath>

#include "nnqft/rg_flow.hpp"
#include "nnqft/wick.hpp"

using namespace nnqft;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("flow theory values", "[rg]") {
  CHECK(beta_theory_relu(1) == -5.0);
  CHECK(beta_theory_relu(2) == -6.0);
  CHECK(beta_theory_relu(3) == -7.0);
  CHECK_THROWS_AS(beta_theory_relu(4), Error);
  CHECK(coupling_dimension(2.0, 4, 1) == -5.0);
  CHECK(coupling_dimension(2.0, 6, 1) == -7.0);
  for (int k : {2, 4, 6}) CHECK(coupling_dimension(0.0, k, 3) == -3.0);
  const auto c = default_rg_cutoffs();
  CHECK(c.size() == 21);
  CHECK(c.front() == 7.0);
  CHECK(c.back() == 1e5);
}

TEST_CASE("slope of an exact power law", "[rg]") {
  SweepResult s;
  for (double l : default_rg_cutoffs()) s.points.push_back({l, -3.0 * std::pow(l, -5.0), 0.0, {}});
  const auto fit = fit_rg_slope(s, 1e3);
  CHECK_THAT(fit.slope, WithinAbs(-5.0, 1e-10));
  CHECK(fit.points == 10);
  s.points[15].error = "bad";
  CHECK(fit_rg_slope(s, 1e3).points == 9);
  CHECK_THROWS_AS(fit_rg_slope(s, 7e4), Error);
}

TEST_CASE("relu vertex integrals grow as the flow predicts", "[rg]") {
  for (int d = 1; d <= 3; ++d) {
    const KernelModel k({Activation::ReLU, d, 1, 20, 1.0, 0.0});
    const auto grid = builtin_grid(d == 1 ? GridName::ReluDefault
                                          : d == 2 ? GridName::ReluD2 : GridName::ReluD3);
    const auto q = default_quadrature(k, grid);
    const std::vector<Point> pts(grid.points.begin(), grid.points.begin() + 4);
    const double a = vertex_integral(k, pts, VertexWeight::One, 1e3, q);
    const double b = vertex_integral(k, pts, VertexWeight::One, 2e3, q);
    CHECK_THAT(b / a, WithinRel(std::pow(2.0, d + 4), 0.01));
  }
}

TEST_CASE("sweeps recover a planted coupling and stay flat for the decaying kernel", "[rg]") {
  const KernelModel k({Activation::Gauss, 1, 1, 1000, 1.0, 1.0});
  const auto grid = builtin_grid(GridName::GaussDefault);
  const auto q = default_quadrature(k, grid);
  const auto gram = k.gram(grid);
  const double lstar = 10.0;
  const auto v4 = vertex_tensor(k, grid, 4, VertexWeight::One, lstar, q);
  const auto g4 = predict_g4_tensor(gram, v4, -0.005);
  const std::vector<double> cutoffs{5.0, lstar, 20.0};
  const auto sweep = cutoff_sweep(g4, k, grid, cutoffs, q);
  REQUIRE(sweep.points.size() == 3);
  for (const auto& p : sweep.points) {
    CHECK_FALSE(p.error);
    CHECK_THAT(p.lambda_bar, WithinRel(-0.005, 1e-3));
  }
  CHECK_THAT(sweep.points[1].lambda_bar, WithinRel(-0.005, 1e-9));
  CHECK(sweep.theory_slope == 0.0);

  const std::vector<double> bad{10.0, 5.0};
  CHECK_THROWS_AS(cutoff_sweep(g4, k, grid, bad, q), Error);
}

TEST_CASE("sweep records per-cutoff failures", "[rg]") {
  const KernelModel k({Activation::ReLU, 1, 1, 20, 1.0, 0.0});
  const auto grid = builtin_grid(GridName::ReluDefault);
  const auto g4 = gp_tensor(k.gram(grid), 4);
  const std::vector<double> cutoffs{0.5, 100.0};
  const auto sweep = cutoff_sweep(g4, k, grid, cutoffs, default_quadrature(k, grid));
  CHECK(sweep.points[0].error.has_value());
  CHECK_FALSE(sweep.points[1].error.has_value());
  CHECK(sweep.points[1].lambda_bar == 0.0);
  CHECK(sweep.theory_slope == -5.0);
}
