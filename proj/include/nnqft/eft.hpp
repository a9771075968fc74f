#pragma once

#include <array>
#include <span>
#include <vector>

#include "nnqft/config.hpp"
#include "nnqft/kernels.hpp"
#include "nnqft/quadrature.hpp"
#include "nnqft/symmetric_tensor.hpp"

namespace nnqft {

/// Quartic couplings lambda(y) = lambda0 + lambda2 |y|^2, the non-local
/// lambda_nl (used only by the fit features), and the sextic kappa.
struct EftConfig {
  double lambda0 = 0.0;
  double lambda2 = 0.0;
  double lambda_nl = 0.0;
  double kappa = 0.0;
  double cutoff = kInfiniteCutoff;
  QuadratureSpec quad;
};

/// Extra factor multiplying the product of K_W legs at a vertex.
enum class VertexWeight { One, NormSq, SelfKernel };

/// Rule sized for the kernel and inputs: per-dimension node count, panels
/// graded at the kernel length scale (none for the scale-free ReLU kernel),
/// and an initial box of 8 max|x| when the cutoff is infinite.
QuadratureSpec default_quadrature(const KernelModel& kernel, double max_norm);
QuadratureSpec default_quadrature(const KernelModel& kernel, const InputGrid& grid);

/// Throws Config unless the cutoff exceeds max_norm, or is infinite for a
/// decaying kernel.
void check_cutoff(const KernelModel& kernel, double cutoff, double max_norm);

/// Integral over the cutoff box of weight(y) * prod_a K_W(x_a, y) for each
/// index tuple in `legs`, all sharing one set of quadrature nodes.
std::vector<double> vertex_integrals(const KernelModel& kernel, std::span<const Point> points,
                                     const std::vector<std::vector<int>>& legs,
                                     VertexWeight weight, double cutoff,
                                     const QuadratureSpec& quad);

/// The same for every unique order-k multiset of a grid.
SymmetricTensor vertex_tensor(const KernelModel& kernel, const InputGrid& grid, int order,
                              VertexWeight weight, double cutoff, const QuadratureSpec& quad);

double vertex_integral(const KernelModel& kernel, std::span<const Point> points,
                       VertexWeight weight, double cutoff, const QuadratureSpec& quad);

/// First-order change of the 4-point function:
/// -24 int lambda(y) prod K_W - 360 kappa int K_W(z, z) prod K_W.
double g4_correction(const KernelModel& kernel, std::span<const Point> points,
                     const EftConfig& eft);

/// GP 4-point function plus g4_correction.
double predict_g4(const KernelModel& kernel, std::span<const Point> points, const EftConfig& eft);

/// predict_g4 over a grid for constant lambda0 (kappa = 0).
SymmetricTensor predict_g4_tensor(const SymmetricTensor& gram, const SymmetricTensor& vertex4,
                                  double lambda0);

/// Per-element coupling (GP4 - G4) / (24 int prod K_W). Throws
/// DegenerateMeasure when a denominator is below 1e-30 in magnitude.
SymmetricTensor extract_lambda_m(const SymmetricTensor& g4, const SymmetricTensor& gram,
                                 const SymmetricTensor& vertex4);
SymmetricTensor extract_lambda_m(const SymmetricTensor& g4, const KernelModel& kernel,
                                 const InputGrid& grid, double cutoff, const QuadratureSpec& quad);

/// Mean over unique elements.
double lambda_bar(const SymmetricTensor& lambda_m);

/// Population standard deviation over unique elements divided by |mean|.
double lambda_rel_spread(const SymmetricTensor& lambda_m);

/// GP 6-point function minus 24 lambda_bar times the 15 terms
/// int prod_{4} K_W(x, y) K(x_e, x_f).
double predict_g6(const KernelModel& kernel, std::span<const Point> points, double lambda_bar,
                  double cutoff, const QuadratureSpec& quad);

/// -24 * sum over the 15 spectator splits of vertex4 * K(e, f); the
/// derivative of the 6-point prediction with respect to lambda_bar.
SymmetricTensor g6_lambda_coefficient(const SymmetricTensor& gram,
                                      const SymmetricTensor& vertex4);

SymmetricTensor predict_g6_tensor(const SymmetricTensor& gram, const SymmetricTensor& vertex4,
                                  double lambda_bar);

/// Sextic-coupling diagrams of the 6-point function, for diagnostics only:
/// -720 kappa int prod_6 K_W - 360 kappa sum_15 int K_W(z, z) prod_4 K_W K(e, f).
SymmetricTensor kappa6_correction(const KernelModel& kernel, const InputGrid& grid, double kappa,
                                  double cutoff, const QuadratureSpec& quad);

struct Delta6 {
  SymmetricTensor delta;
  std::vector<bool> flagged;  // empirical element was 0
  double mean_abs = 0.0;      // over unflagged elements
};

/// (G6 - prediction) / G6 elementwise.
Delta6 delta6(const SymmetricTensor& g6, const SymmetricTensor& prediction);

}  // namespace nnqft
