#include "nnqft/correlators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

#include "nnqft/wick.hpp"

namespace nnqft {

SymmetricTensor CorrelationTensor::std_dev() const {
  SymmetricTensor out(grid_size, order);
  const int n = n_experiments();
  if (n < 2) return out;
  for (std::size_t m = 0; m < out.size(); ++m) {
    double ss = 0.0;
    for (const auto& e : experiments) {
      const double d = e[m] - pooled[m];
      ss += d * d;
    }
    out[m] = std::sqrt(ss / (n - 1));
  }
  return out;
}

CorrelationTensor from_experiments(std::vector<SymmetricTensor> experiments,
                                   std::int64_t count_per_experiment) {
  if (experiments.empty()) throw Error(ErrorCode::InvalidCount, "no experiments");
  CorrelationTensor out;
  out.order = experiments.front().order();
  out.grid_size = experiments.front().dim();
  out.count_per_experiment = count_per_experiment;
  out.pooled = SymmetricTensor(out.grid_size, out.order);
  for (const auto& e : experiments) {
    SymmetricTensor::check_same_shape(e, out.pooled);
    for (std::size_t m = 0; m < e.size(); ++m) out.pooled[m] += e[m];
  }
  for (std::size_t m = 0; m < out.pooled.size(); ++m) {
    out.pooled[m] /= static_cast<double>(experiments.size());
  }
  out.experiments = std::move(experiments);
  return out;
}

CorrelationTensor empirical_npt(std::span<const MomentAccumulator> acc, int order) {
  if (acc.empty()) throw Error(ErrorCode::InvalidCount, "no accumulators");
  const int g = acc.front().grid_size();
  const auto count = acc.front().count();
  std::vector<SymmetricTensor> per;
  per.reserve(acc.size());
  for (const auto& a : acc) {
    if (a.grid_size() != g) {
      throw Error(ErrorCode::Config, "accumulators were built over different grids");
    }
    if (a.count() != count) {
      throw Error(ErrorCode::Config, "accumulators hold different network counts");
    }
    per.push_back(a.mean(order));
  }
  return from_experiments(std::move(per), count);
}

DeviationReport deviation(const CorrelationTensor& emp, const SymmetricTensor& gp) {
  SymmetricTensor::check_same_shape(emp.pooled, gp);
  DeviationReport r;
  r.order = emp.order;
  r.gp = gp;
  const int g = emp.grid_size;
  r.delta = SymmetricTensor(g, emp.order);
  r.m = SymmetricTensor(g, emp.order);
  r.m_std = SymmetricTensor(g, emp.order);
  r.ci_low = SymmetricTensor(g, emp.order);
  r.ci_high = SymmetricTensor(g, emp.order);
  r.degenerate.assign(gp.size(), false);

  const int n = emp.n_experiments();
  double bg_sum = 0.0;
  double abs_sum = 0.0;
  int used = 0;
  for (std::size_t k = 0; k < gp.size(); ++k) {
    r.delta[k] = emp.pooled[k] - gp[k];
    if (gp[k] == 0.0) {
      r.degenerate[k] = true;
      continue;
    }
    r.m[k] = r.delta[k] / gp[k];
    // m is affine in G, so its across-experiment spread is that of G scaled
    double ss = 0.0;
    for (const auto& e : emp.experiments) {
      const double d = (e[k] - emp.pooled[k]) / gp[k];
      ss += d * d;
    }
    r.m_std[k] = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    const double half = 1.96 * r.m_std[k] / std::sqrt(static_cast<double>(n));
    r.ci_low[k] = r.m[k] - half;
    r.ci_high[k] = r.m[k] + half;
    bg_sum += r.m_std[k];
    abs_sum += std::abs(r.m[k]);
    ++used;
  }
  if (used > 0) {
    r.background = bg_sum / used;
    r.mean_abs_m = abs_sum / used;
  }
  return r;
}

DeviationReport deviation(const CorrelationTensor& emp, const KernelModel& kernel,
                          const InputGrid& grid) {
  if (grid.size() != emp.grid_size) {
    throw Error(ErrorCode::Config, "grid does not match the correlation tensor");
  }
  return deviation(emp, gp_tensor(kernel.gram(grid), emp.order));
}

namespace {

// The three ways to split four slots into two pairs.
constexpr std::array<std::array<int, 4>, 3> kPairSplits{{{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}}};

double disconnected4(const SymmetricTensor& g2, const std::vector<int>& idx) {
  double s = 0.0;
  for (const auto& p : kPairSplits) {
    s += g2.at({idx[p[0]], idx[p[1]]}) * g2.at({idx[p[2]], idx[p[3]]});
  }
  return s;
}

void check_connected_inputs(const SymmetricTensor& g2, int dim) {
  if (g2.order() != 2 || g2.dim() != dim) {
    throw Error(ErrorCode::Config, "G2 tensor does not match the grid");
  }
}

}  // namespace

SymmetricTensor connected4(const SymmetricTensor& g4, const SymmetricTensor& g2) {
  if (g4.order() != 4) throw Error(ErrorCode::Config, "connected4 needs an order-4 tensor");
  check_connected_inputs(g2, g4.dim());
  SymmetricTensor out(g4.dim(), 4);
  for (std::size_t k = 0; k < g4.size(); ++k) {
    out[k] = g4[k] - disconnected4(g2, g4.indices(k));
  }
  return out;
}

CorrelationTensor connected4(const CorrelationTensor& emp4, const SymmetricTensor& g2) {
  std::vector<SymmetricTensor> per;
  per.reserve(emp4.experiments.size());
  for (const auto& e : emp4.experiments) per.push_back(connected4(e, g2));
  auto out = from_experiments(std::move(per), emp4.count_per_experiment);
  out.pooled = connected4(emp4.pooled, g2);
  return out;
}

SymmetricTensor connected6(const SymmetricTensor& g6, const SymmetricTensor& g4,
                           const SymmetricTensor& g2) {
  if (g6.order() != 6 || g4.order() != 4) {
    throw Error(ErrorCode::Config, "connected6 needs order-6 and order-4 tensors");
  }
  check_connected_inputs(g2, g6.dim());
  const auto c4 = connected4(g4, g2);
  const auto gp6 = gp_tensor(g2, 6);
  SymmetricTensor out(g6.dim(), 6);
  std::array<int, 4> quad{};
  for (std::size_t k = 0; k < g6.size(); ++k) {
    const auto& idx = g6.indices(k);
    double s = 0.0;
    for (const auto& split : spectator_splits()) {
      for (int q = 0; q < 4; ++q) quad[q] = idx[split.quad[q]];
      s += c4.at(quad) * g2.at({idx[split.pair[0]], idx[split.pair[1]]});
    }
    out[k] = g6[k] - s - gp6[k];
  }
  return out;
}

CorrelationTensor connected6(const CorrelationTensor& emp6, const CorrelationTensor& emp4,
                             const SymmetricTensor& g2) {
  if (emp6.experiments.size() != emp4.experiments.size()) {
    throw Error(ErrorCode::Config, "order-6 and order-4 tensors have different experiment counts");
  }
  std::vector<SymmetricTensor> per;
  per.reserve(emp6.experiments.size());
  for (std::size_t e = 0; e < emp6.experiments.size(); ++e) {
    per.push_back(connected6(emp6.experiments[e], emp4.experiments[e], g2));
  }
  auto out = from_experiments(std::move(per), emp6.count_per_experiment);
  out.pooled = connected6(emp6.pooled, emp4.pooled, g2);
  return out;
}

double g6_connected_background(double dg6_std, double dg4_std, double g2) {
  return std::sqrt(dg6_std * dg6_std + (g2 * dg4_std) * (g2 * dg4_std));
}

SymmetricTensor g6_connected_background_tensor(const SymmetricTensor& dg6_std,
                                               const SymmetricTensor& dg4_std,
                                               const SymmetricTensor& g2) {
  check_connected_inputs(g2, dg6_std.dim());
  SymmetricTensor out(dg6_std.dim(), 6);
  std::array<int, 4> quad{};
  for (std::size_t k = 0; k < dg6_std.size(); ++k) {
    const auto& idx = dg6_std.indices(k);
    double var = dg6_std[k] * dg6_std[k];
    for (const auto& split : spectator_splits()) {
      for (int q = 0; q < 4; ++q) quad[q] = idx[split.quad[q]];
      const double t = g2.at({idx[split.pair[0]], idx[split.pair[1]]}) * dg4_std.at(quad);
      var += t * t;
    }
    out[k] = std::sqrt(var);
  }
  return out;
}

double g6_connected_background(const SymmetricTensor& dg6_std, const SymmetricTensor& dg4_std,
                               const SymmetricTensor& g2) {
  return g6_connected_background_tensor(dg6_std, dg4_std, g2).mean();
}

SlopeFit scaling_slope(std::span<const double> n, std::span<const double> value,
                       std::span<const bool> mask) {
  if (n.size() != value.size() || n.size() != mask.size()) {
    throw Error(ErrorCode::DimensionMismatch, "slope series lengths differ");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!mask[i] || !(n[i] > 0.0) || value[i] == 0.0 || !std::isfinite(value[i])) continue;
    xs.push_back(std::log(n[i]));
    ys.push_back(std::log(std::abs(value[i])));
  }
  if (xs.size() < 3) {
    throw Error(ErrorCode::InsufficientSignal,
                "need at least 3 points above background, have " + std::to_string(xs.size()));
  }
  const double k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::InsufficientSignal, "all widths coincide");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.points = static_cast<int>(xs.size());
  return fit;
}

SlopeFit scaling_slope(std::span<const double> n, std::span<const double> value) {
  // std::vector<bool> is not contiguous
  std::unique_ptr<bool[]> all(new bool[n.size()]);
  std::fill(all.get(), all.get() + n.size(), true);
  return scaling_slope(n, value, std::span<const bool>(all.get(), n.size()));
}

}  // namespace nnqft
