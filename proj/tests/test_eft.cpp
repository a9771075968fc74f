#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "nnqft/eft.hpp"
#include "nnqft/wick.hpp"

using namespace nnqft;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

KernelModel gauss() { return KernelModel({Activation::Gauss, 1, 1, 1000, 1.0, 1.0}); }

}  // namespace

TEST_CASE("quartic correction at coincident points", "[eft]") {
  const auto k = gauss();
  EftConfig eft;
  eft.lambda0 = 1.0;
  eft.quad = default_quadrature(k, 0.0);
  const std::vector<Point> zero(4, Point{0.0});
  CHECK_THAT(g4_correction(k, zero, eft), WithinRel(-24.0 * std::sqrt(std::numbers::pi / 2.0), 1e-8));
  CHECK_THAT(g4_correction(k, zero, eft), WithinAbs(-30.0796, 1e-4));
  eft.lambda0 = 0.0;
  CHECK(g4_correction(k, zero, eft) == 0.0);
  CHECK(predict_g4(k, zero, eft) == gp_npt(k, zero));
}

TEST_CASE("vertex integral against a Monte Carlo oracle", "[eft]") {
  const auto k = gauss();
  const std::vector<Point> pts(4, Point{0.002});
  const double v = vertex_integral(k, pts, VertexWeight::One, kInf, default_quadrature(k, 0.002));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-12.0, 12.0);
  double s = 0.0;
  const int n = 10'000'000;
  for (int i = 0; i < n; ++i) {
    const double y = u(rng);
    s += std::pow(std::exp(-(0.002 - y) * (0.002 - y) / 2.0), 4);
  }
  CHECK_THAT(v, WithinRel(24.0 * s / n, 1e-3));
}

TEST_CASE("correction matches an explicit transcription", "[eft]") {
  const KernelModel k({Activation::Gauss, 1, 1, 10, 1.3, 0.7});
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 5; ++t) {
    std::vector<Point> p;
    for (int a = 0; a < 4; ++a) p.push_back({u(rng)});
    EftConfig eft;
    eft.lambda0 = 0.013;
    eft.lambda2 = -0.004;
    eft.cutoff = 6.0;
    eft.quad = default_quadrature(k, 1.0);
    auto kw = [&](double x, double y) { return 1.3 * std::exp(-1.3 * (x - y) * (x - y) / 2.0); };
    auto integrand = [&](std::span<const double> y) {
      double prod = 1.0;
      for (const auto& x : p) prod *= kw(x[0], y[0]);
      return (0.013 - 0.004 * y[0] * y[0]) * prod;
    };
    QuadratureSpec q;
    q.points = 200;
    const double corr = -24.0 * integrate_box(integrand, 6.0, 1, q);
    auto kk = [&](int a, int b) { return 0.7 + kw(p[a][0], p[b][0]); };
    const double gp = kk(0, 1) * kk(2, 3) + kk(0, 2) * kk(1, 3) + kk(0, 3) * kk(1, 2);
    CHECK_THAT(predict_g4(k, p, eft), WithinRel(gp + corr, 1e-9));
  }
}

TEST_CASE("extracted coupling round trip", "[eft]") {
  const auto k = gauss();
  const auto grid = builtin_grid(GridName::GaussDefault);
  const auto q = default_quadrature(k, grid);
  const auto gram = k.gram(grid);
  const auto v4 = vertex_tensor(k, grid, 4, VertexWeight::One, kInf, q);
  for (double l0 : {0.0, 0.0042, -0.3}) {
    const auto lm = extract_lambda_m(predict_g4_tensor(gram, v4, l0), gram, v4);
    for (double v : lm.values()) CHECK_THAT(v, WithinAbs(l0, 1e-12));
    CHECK_THAT(lambda_bar(lm), WithinAbs(l0, 1e-12));
  }
  // the tensor path agrees with the pointwise prediction
  EftConfig eft;
  eft.lambda0 = 0.0042;
  eft.quad = q;
  const auto t = predict_g4_tensor(gram, v4, 0.0042);
  for (std::size_t m = 0; m < t.size(); m += 11) {
    std::vector<Point> pts;
    for (int i : t.indices(m)) pts.push_back(grid.points[i]);
    CHECK_THAT(t[m], WithinRel(predict_g4(k, pts, eft), 1e-7));
  }
}

TEST_CASE("lambda statistics", "[eft]") {
  const SymmetricTensor c(3, 4, 0.25);
  CHECK(lambda_bar(c) == 0.25);
  CHECK(lambda_rel_spread(c) == 0.0);
  SymmetricTensor pair(2, 1);
  pair[0] = 1.0;
  pair[1] = 3.0;
  CHECK(lambda_bar(pair) == 2.0);
  CHECK_THAT(lambda_rel_spread(pair), WithinAbs(0.5, 1e-15));
}

TEST_CASE("zero vertex integrals are degenerate", "[eft]") {
  const SymmetricTensor gram(1, 2, 1.0);
  const SymmetricTensor g4(1, 4, 3.0);
  const SymmetricTensor v4(1, 4, 0.0);
  try {
    extract_lambda_m(g4, gram, v4);
    FAIL("expected a degenerate measure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateMeasure);
  }
}

TEST_CASE("cutoff validation", "[eft]") {
  const KernelModel relu({Activation::ReLU, 1, 1, 20, 1.0, 0.0});
  CHECK_THROWS_AS(check_cutoff(relu, kInf, 1.0), Error);
  CHECK_THROWS_AS(check_cutoff(relu, 0.5, 1.0), Error);
  CHECK_NOTHROW(check_cutoff(relu, 1e5, 1.0));
  CHECK_NOTHROW(check_cutoff(gauss(), kInf, 1.0));
}

TEST_CASE("6-point prediction", "[eft]") {
  const auto k = gauss();
  const auto grid = builtin_grid(GridName::GaussDefault);
  const auto q = default_quadrature(k, grid);
  const auto gram = k.gram(grid);
  const auto v4 = vertex_tensor(k, grid, 4, VertexWeight::One, kInf, q);
  CHECK(spectator_splits().size() == 15);

  const auto zero = predict_g6_tensor(gram, v4, 0.0);
  const auto gp6 = gp_tensor(gram, 6);
  for (std::size_t m = 0; m < zero.size(); ++m) CHECK(zero[m] == gp6[m]);

  // affine in lambda_bar
  const auto a = predict_g6_tensor(gram, v4, 0.01);
  const auto b = predict_g6_tensor(gram, v4, 0.02);
  for (std::size_t m = 0; m < a.size(); m += 17) {
    CHECK_THAT(b[m] - a[m], WithinRel(a[m] - zero[m], 1e-9));
  }

  // explicit 15-term sum at the six distinct grid points
  std::vector<Point> pts(grid.points.begin(), grid.points.end());
  double corr = 0.0;
  for (int e = 0; e < 6; ++e) {
    for (int f = e + 1; f < 6; ++f) {
      std::vector<Point> quad;
      for (int a2 = 0; a2 < 6; ++a2) {
        if (a2 != e && a2 != f) quad.push_back(pts[a2]);
      }
      corr += vertex_integral(k, quad, VertexWeight::One, kInf, q) * k(pts[e], pts[f]);
    }
  }
  const double expect = gp_npt(k, pts) - 24.0 * 0.01 * corr;
  CHECK_THAT(predict_g6(k, pts, 0.01, kInf, q), WithinRel(expect, 1e-10));
  CHECK_THAT(a.at({0, 1, 2, 3, 4, 5}), WithinRel(expect, 1e-10));
}

TEST_CASE("relative 6-point error", "[eft]") {
  SymmetricTensor g6(2, 6, 2.0);
  g6[3] = 0.0;
  const auto same = delta6(g6, g6);
  CHECK(same.mean_abs == 0.0);
  CHECK(same.flagged[3]);
  const auto off = delta6(g6, SymmetricTensor(2, 6, 1.0));
  CHECK_THAT(off.mean_abs, WithinAbs(0.5, 1e-15));
}

TEST_CASE("sextic coupling vanishes when kappa is zero", "[eft]") {
  const auto k = gauss();
  const auto grid = builtin_grid(GridName::GaussDefault);
  const auto q = default_quadrature(k, grid);
  const auto k6 = kappa6_correction(k, grid, 0.0, 5.0, q);
  for (double v : k6.values()) CHECK(v == 0.0);
}
