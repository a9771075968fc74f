#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "nnqft/errors.hpp"
#include "nnqft/quadrature.hpp"

using namespace nnqft;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("gauss-legendre rules integrate polynomials exactly", "[quadrature]") {
  for (int n : {4, 16, 64}) {
    const auto& r = gauss_legendre(n);
    double w = 0.0, x2 = 0.0, odd = 0.0;
    for (int i = 0; i < n; ++i) {
      w += r.weights[i];
      x2 += r.weights[i] * r.nodes[i] * r.nodes[i];
      odd += r.weights[i] * std::pow(r.nodes[i], 3);
    }
    CHECK_THAT(w, WithinAbs(2.0, 1e-14));
    CHECK_THAT(x2, WithinAbs(2.0 / 3.0, 1e-14));
    CHECK_THAT(odd, WithinAbs(0.0, 1e-14));
  }
}

TEST_CASE("box integrals with closed forms", "[quadrature]") {
  QuadratureSpec spec;
  CHECK_THAT(integrate_box([](std::span<const double>) { return 1.0; }, 1.0, 2, spec),
             WithinAbs(4.0, 1e-12));
  CHECK_THAT(integrate_box([](std::span<const double> y) { return std::exp(-y[0] * y[0]); },
                           std::numeric_limits<double>::infinity(), 1, spec),
             WithinRel(std::sqrt(std::numbers::pi), 1e-10));
  spec.grading_scale = 1.0;
  spec.points = 8;
  spec.initial_cutoff = 4.0;
  const double g3 = integrate_box(
      [](std::span<const double> y) {
        return std::exp(-(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) / 2.0);
      },
      std::numeric_limits<double>::infinity(), 3, spec);
  CHECK_THAT(g3, WithinRel(std::pow(2.0 * std::numbers::pi, 1.5), 1e-8));
  // |y|^2 over a cube: d * (2L)^(d-1) * 2 L^3 / 3
  spec = QuadratureSpec{};
  const double r2 = integrate_box(
      [](std::span<const double> y) { return y[0] * y[0] + y[1] * y[1]; }, 3.0, 2, spec);
  CHECK_THAT(r2, WithinRel(2.0 * 6.0 * 18.0, 1e-12));
}

TEST_CASE("batched integrals share nodes", "[quadrature]") {
  QuadratureSpec spec;
  const auto v = integrate_box_batch(
      [](std::span<const double> y, std::span<double> out) {
        out[0] = 1.0;
        out[1] = std::abs(y[0]);
      },
      2, 2.0, 1, spec);
  CHECK_THAT(v[0], WithinAbs(4.0, 1e-12));
  CHECK_THAT(v[1], WithinAbs(4.0, 1e-12));
}

TEST_CASE("monte carlo agrees with the tensor rule", "[quadrature]") {
  QuadratureSpec mc;
  mc.scheme = QuadratureSpec::Scheme::MonteCarlo;
  mc.samples = 2'000'000;
  mc.seed = 3;
  auto f = [](std::span<const double> y) { return std::exp(-0.5 * (y[0] * y[0] + y[1] * y[1])) * (1.0 + y[0] * y[1] * y[1]); };
  const double gl = integrate_box(f, 4.0, 2, QuadratureSpec{});
  CHECK_THAT(integrate_box(f, 4.0, 2, mc), WithinRel(gl, 5e-3));
}

TEST_CASE("unusable quadrature settings are configuration errors", "[quadrature]") {
  QuadratureSpec mc;
  mc.scheme = QuadratureSpec::Scheme::MonteCarlo;
  CHECK_THROWS_AS(check_quadrature(mc, 1), Error);
  QuadratureSpec few;
  few.points = 8;
  CHECK_THROWS_AS(check_quadrature(few, 1), Error);
  QuadratureSpec tol;
  tol.tolerance = 0.0;
  CHECK_THROWS_AS(check_quadrature(tol, 2), Error);
  CHECK(default_quad_points(1) == 64);
  CHECK(default_quad_points(2) == 48);
  CHECK(default_quad_points(3) == 32);
}

TEST_CASE("a growing integrand never settles on an infinite box", "[quadrature]") {
  QuadratureSpec spec;
  spec.max_doublings = 6;
  try {
    integrate_box([](std::span<const double>) { return 1.0; },
                  std::numeric_limits<double>::infinity(), 1, spec);
    FAIL("expected non-convergence");
  } catch (const QuadratureError& e) {
    CHECK(e.code() == ErrorCode::QuadratureNonConvergence);
    CHECK(e.last_estimate() > 0.0);
  }
}
