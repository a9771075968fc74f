#include "nnqft/eft.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nnqft/wick.hpp"

namespace nnqft {

QuadratureSpec default_quadrature(const KernelModel& kernel, double max_norm) {
  const auto& spec = kernel.spec();
  QuadratureSpec q;
  q.points = default_quad_points(spec.d_in);
  const bool scale_free = spec.activation == Activation::ReLU && spec.sigma_b_sq == 0.0;
  q.grading_scale = scale_free ? 0.0 : kernel.length_scale();
  q.initial_cutoff = max_norm > 0.0 ? 8.0 * max_norm : kernel.length_scale();
  return q;
}

QuadratureSpec default_quadrature(const KernelModel& kernel, const InputGrid& grid) {
  return default_quadrature(kernel, grid.max_norm());
}

void check_cutoff(const KernelModel& kernel, double cutoff, double max_norm) {
  if (!(cutoff > 0.0)) throw Error(ErrorCode::Config, "cutoff must be positive");
  if (std::isinf(cutoff)) {
    if (!kernel.decays()) {
      throw Error(ErrorCode::Config, "an infinite cutoff needs a decaying kernel; " +
                                         std::string(to_string(kernel.spec().activation)) +
                                         " requires a finite cutoff");
    }
    return;
  }
  if (cutoff <= max_norm) {
    throw Error(ErrorCode::Config, "cutoff " + std::to_string(cutoff) +
                                       " must exceed the largest input norm " +
                                       std::to_string(max_norm));
  }
}

namespace {

double norm_of(std::span<const Point> points) {
  double best = 0.0;
  for (const auto& p : points) {
    double sq = 0.0;
    for (double v : p) sq += v * v;
    best = std::max(best, std::sqrt(sq));
  }
  return best;
}

}  // namespace

std::vector<double> vertex_integrals(const KernelModel& kernel, std::span<const Point> points,
                                     const std::vector<std::vector<int>>& legs,
                                     VertexWeight weight, double cutoff,
                                     const QuadratureSpec& quad) {
  const int d = kernel.spec().d_in;
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != d) {
      throw Error(ErrorCode::DimensionMismatch, "vertex point dimension differs from d_in");
    }
  }
  check_cutoff(kernel, cutoff, norm_of(points));
  const std::size_t n_points = points.size();
  auto integrand = [&](std::span<const double> y, std::span<double> out) {
    double kw[64];
    std::vector<double> heap;
    double* k = kw;
    if (n_points > 64) {
      heap.resize(n_points);
      k = heap.data();
    }
    for (std::size_t a = 0; a < n_points; ++a) k[a] = kernel.weight_part(points[a], y);
    double w = 1.0;
    if (weight == VertexWeight::NormSq) {
      w = 0.0;
      for (double v : y) w += v * v;
    } else if (weight == VertexWeight::SelfKernel) {
      w = kernel.weight_part(y, y);
    }
    for (std::size_t t = 0; t < legs.size(); ++t) {
      double prod = w;
      for (int a : legs[t]) prod *= k[a];
      out[t] = prod;
    }
  };
  return integrate_box_batch(integrand, legs.size(), cutoff, d, quad);
}

SymmetricTensor vertex_tensor(const KernelModel& kernel, const InputGrid& grid, int order,
                              VertexWeight weight, double cutoff, const QuadratureSpec& quad) {
  SymmetricTensor out(grid.size(), order);
  std::vector<std::vector<int>> legs;
  legs.reserve(out.size());
  for (std::size_t m = 0; m < out.size(); ++m) legs.push_back(out.indices(m));
  const auto values = vertex_integrals(kernel, grid.points, legs, weight, cutoff, quad);
  std::copy(values.begin(), values.end(), out.values().begin());
  return out;
}

double vertex_integral(const KernelModel& kernel, std::span<const Point> points,
                       VertexWeight weight, double cutoff, const QuadratureSpec& quad) {
  std::vector<int> all(points.size());
  for (std::size_t a = 0; a < points.size(); ++a) all[a] = static_cast<int>(a);
  return vertex_integrals(kernel, points, {all}, weight, cutoff, quad).front();
}

double g4_correction(const KernelModel& kernel, std::span<const Point> points,
                     const EftConfig& eft) {
  if (points.size() != 4) throw Error(ErrorCode::Config, "g4_correction needs four points");
  double total = 0.0;
  if (eft.lambda0 != 0.0) {
    total -= 24.0 * eft.lambda0 *
             vertex_integral(kernel, points, VertexWeight::One, eft.cutoff, eft.quad);
  }
  if (eft.lambda2 != 0.0) {
    total -= 24.0 * eft.lambda2 *
             vertex_integral(kernel, points, VertexWeight::NormSq, eft.cutoff, eft.quad);
  }
  if (eft.kappa != 0.0) {
    total -= 360.0 * eft.kappa *
             vertex_integral(kernel, points, VertexWeight::SelfKernel, eft.cutoff, eft.quad);
  }
  return total;
}

double predict_g4(const KernelModel& kernel, std::span<const Point> points,
                  const EftConfig& eft) {
  return gp_npt(kernel, points) + g4_correction(kernel, points, eft);
}

SymmetricTensor predict_g4_tensor(const SymmetricTensor& gram, const SymmetricTensor& vertex4,
                                  double lambda0) {
  const auto gp4 = gp_tensor(gram, 4);
  return SymmetricTensor::zip(gp4, vertex4,
                              [&](double gp, double v) { return gp - 24.0 * lambda0 * v; });
}

SymmetricTensor extract_lambda_m(const SymmetricTensor& g4, const SymmetricTensor& gram,
                                 const SymmetricTensor& vertex4) {
  const auto gp4 = gp_tensor(gram, 4);
  SymmetricTensor::check_same_shape(g4, gp4);
  SymmetricTensor::check_same_shape(g4, vertex4);
  SymmetricTensor out(g4.dim(), 4);
  for (std::size_t m = 0; m < out.size(); ++m) {
    const double den = 24.0 * vertex4[m];
    if (!(std::abs(den) >= 1e-30)) {
      throw Error(ErrorCode::DegenerateMeasure,
                  "vertex integral vanishes for element " + std::to_string(m));
    }
    out[m] = (gp4[m] - g4[m]) / den;
  }
  return out;
}

SymmetricTensor extract_lambda_m(const SymmetricTensor& g4, const KernelModel& kernel,
                                 const InputGrid& grid, double cutoff, const QuadratureSpec& quad) {
  return extract_lambda_m(g4, kernel.gram(grid),
                          vertex_tensor(kernel, grid, 4, VertexWeight::One, cutoff, quad));
}

double lambda_bar(const SymmetricTensor& lambda_m) { return lambda_m.mean(); }

double lambda_rel_spread(const SymmetricTensor& lambda_m) {
  const double mean = lambda_m.mean();
  double ss = 0.0;
  for (double v : lambda_m.values()) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(lambda_m.size()));
  return sd / std::abs(mean);
}

double predict_g6(const KernelModel& kernel, std::span<const Point> points, double lambda_bar,
                  double cutoff, const QuadratureSpec& quad) {
  if (points.size() != 6) throw Error(ErrorCode::Config, "predict_g6 needs six points");
  const auto& splits = spectator_splits();
  std::vector<std::vector<int>> legs;
  for (const auto& s : splits) legs.push_back({s.quad.begin(), s.quad.end()});
  double correction = 0.0;
  if (lambda_bar != 0.0) {
    const auto v = vertex_integrals(kernel, points, legs, VertexWeight::One, cutoff, quad);
    for (std::size_t t = 0; t < splits.size(); ++t) {
      correction += v[t] * kernel(points[splits[t].pair[0]], points[splits[t].pair[1]]);
    }
  }
  return gp_npt(kernel, points) - 24.0 * lambda_bar * correction;
}

SymmetricTensor g6_lambda_coefficient(const SymmetricTensor& gram,
                                      const SymmetricTensor& vertex4) {
  if (vertex4.order() != 4 || gram.order() != 2 || gram.dim() != vertex4.dim()) {
    throw Error(ErrorCode::Config, "g6 coefficient needs a Gram matrix and order-4 vertices");
  }
  SymmetricTensor out(gram.dim(), 6);
  std::array<int, 4> quad{};
  for (std::size_t m = 0; m < out.size(); ++m) {
    const auto& idx = out.indices(m);
    double s = 0.0;
    for (const auto& split : spectator_splits()) {
      for (int q = 0; q < 4; ++q) quad[q] = idx[split.quad[q]];
      s += vertex4.at(quad) * gram.at({idx[split.pair[0]], idx[split.pair[1]]});
    }
    out[m] = -24.0 * s;
  }
  return out;
}

SymmetricTensor predict_g6_tensor(const SymmetricTensor& gram, const SymmetricTensor& vertex4,
                                  double lambda_bar) {
  const auto gp6 = gp_tensor(gram, 6);
  const auto coef = g6_lambda_coefficient(gram, vertex4);
  return SymmetricTensor::zip(gp6, coef,
                              [&](double gp, double c) { return gp + lambda_bar * c; });
}

SymmetricTensor kappa6_correction(const KernelModel& kernel, const InputGrid& grid, double kappa,
                                  double cutoff, const QuadratureSpec& quad) {
  const auto gram = kernel.gram(grid);
  const auto six = vertex_tensor(kernel, grid, 6, VertexWeight::One, cutoff, quad);
  const auto self4 = vertex_tensor(kernel, grid, 4, VertexWeight::SelfKernel, cutoff, quad);
  SymmetricTensor out(grid.size(), 6);
  std::array<int, 4> q4{};
  for (std::size_t m = 0; m < out.size(); ++m) {
    const auto& idx = out.indices(m);
    double s = 0.0;
    for (const auto& split : spectator_splits()) {
      for (int q = 0; q < 4; ++q) q4[q] = idx[split.quad[q]];
      s += self4.at(q4) * gram.at({idx[split.pair[0]], idx[split.pair[1]]});
    }
    out[m] = -kappa * (720.0 * six[m] + 360.0 * s);
  }
  return out;
}

Delta6 delta6(const SymmetricTensor& g6, const SymmetricTensor& prediction) {
  SymmetricTensor::check_same_shape(g6, prediction);
  Delta6 r;
  r.delta = SymmetricTensor(g6.dim(), g6.order());
  r.flagged.assign(g6.size(), false);
  double sum = 0.0;
  int used = 0;
  for (std::size_t m = 0; m < g6.size(); ++m) {
    if (g6[m] == 0.0) {
      r.flagged[m] = true;
      continue;
    }
    r.delta[m] = (g6[m] - prediction[m]) / g6[m];
    sum += std::abs(r.delta[m]);
    ++used;
  }
  if (used > 0) r.mean_abs = sum / used;
  return r;
}

}  // namespace nnqft
