#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace nnqft {

/// How to integrate over the box [-L, L]^d.
///
/// Gauss-Legendre rules are composite: each axis is split at 0 and, when
/// `grading_scale` > 0, at +-s, +-2s, +-4s, ... up to the cutoff, with
/// `points` nodes in every panel. An infinite cutoff doubles L from
/// `initial_cutoff` until the result settles.
struct QuadratureSpec {
  enum class Scheme { GaussLegendre, MonteCarlo };

  Scheme scheme = Scheme::GaussLegendre;
  int points = 0;  // nodes per panel per axis; 0 selects default_quad_points(d)
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  double tolerance = 1e-6;
  int max_refinements = 4;
  double grading_scale = 0.0;
  double initial_cutoff = 1.0;
  int max_doublings = 40;
};

/// 64 for d = 1, 48 for d = 2, 32 for d >= 3.
int default_quad_points(int d);

/// Throws Config when the spec is unusable for dimension d.
void check_quadrature(const QuadratureSpec& spec, int d);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendreRule& gauss_legendre(int n);

/// Composite one-axis rule over [-cutoff, cutoff].
GaussLegendreRule composite_rule(double cutoff, int points, double grading_scale);

/// Integrand filling `out` (length n_out) at node y.
using BatchIntegrand = std::function<void(std::span<const double> y, std::span<double> out)>;

/// Integrates n_out functions sharing their evaluation nodes. Refinement
/// doubles the nodes per panel until every component changes by less than
/// the relative tolerance. Throws QuadratureError when that never happens.
std::vector<double> integrate_box_batch(const BatchIntegrand& f, std::size_t n_out,
                                        double cutoff, int d, const QuadratureSpec& spec);

double integrate_box(const std::function<double(std::span<const double>)>& f, double cutoff,
                     int d, const QuadratureSpec& spec);

}  // namespace nnqft
