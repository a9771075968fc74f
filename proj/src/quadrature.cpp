#include "nnqft/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <string>

#include <boost/math/special_functions/legendre.hpp>

#include "nnqft/errors.hpp"

namespace nnqft {

int default_quad_points(int d) {
  if (d <= 1) return 64;
  if (d == 2) return 48;
  return 32;
}

void check_quadrature(const QuadratureSpec& spec, int d) {
  if (d < 1) throw Error(ErrorCode::Config, "quadrature dimension must be positive");
  if (!(spec.tolerance > 0.0)) throw Error(ErrorCode::Config, "quadrature tolerance must be > 0");
  if (spec.scheme == QuadratureSpec::Scheme::MonteCarlo) {
    if (d < 2) throw Error(ErrorCode::Config, "Monte Carlo quadrature requires d_in >= 2");
    if (spec.samples < 1) throw Error(ErrorCode::Config, "Monte Carlo needs samples > 0");
    return;
  }
  const int p = spec.points > 0 ? spec.points : default_quad_points(d);
  if (d == 1 && p < 16) {
    throw Error(ErrorCode::Config, "Gauss-Legendre needs at least 16 points per axis for d_in = 1");
  }
  if (p < 2) throw Error(ErrorCode::Config, "Gauss-Legendre needs at least 2 points per axis");
}

const GaussLegendreRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussLegendreRule rule;
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  auto weight = [n](double x) {
    const double dp = boost::math::legendre_p_prime(n, x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  // zeros holds the non-negative roots in increasing order
  for (auto r = zeros.rbegin(); r != zeros.rend(); ++r) {
    if (*r == 0.0) continue;
    rule.nodes.push_back(-*r);
    rule.weights.push_back(weight(*r));
  }
  for (double z : zeros) {
    rule.nodes.push_back(z);
    rule.weights.push_back(weight(z));
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

GaussLegendreRule composite_rule(double cutoff, int points, double grading_scale) {
  std::vector<double> breaks{0.0};
  if (grading_scale > 0.0) {
    for (double b = grading_scale; b < cutoff; b *= 2.0) breaks.push_back(b);
  }
  breaks.push_back(cutoff);
  const auto& base = gauss_legendre(points);
  GaussLegendreRule out;
  auto panel = [&](double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (std::size_t k = 0; k < base.nodes.size(); ++k) {
      out.nodes.push_back(mid + half * base.nodes[k]);
      out.weights.push_back(half * base.weights[k]);
    }
  };
  for (std::size_t b = breaks.size() - 1; b > 0; --b) panel(-breaks[b], -breaks[b - 1]);
  for (std::size_t b = 1; b < breaks.size(); ++b) panel(breaks[b - 1], breaks[b]);
  return out;
}

namespace {

constexpr double kMaxNodes = 2e8;

// Tensor-product rule; first-axis slices are summed independently and then
// combined in slice order, so the result does not depend on the thread count.
std::vector<double> tensor_rule(const BatchIntegrand& f, std::size_t n_out, int d,
                                const GaussLegendreRule& rule) {
  const std::size_t m = rule.nodes.size();
  std::vector<std::vector<double>> slices(m);

#pragma omp parallel
  {
    std::vector<double> y(static_cast<std::size_t>(d));
    std::vector<double> vals(n_out);
    std::vector<std::size_t> idx(static_cast<std::size_t>(d));
#pragma omp for schedule(dynamic, 1)
    for (std::size_t i0 = 0; i0 < m; ++i0) {
      std::vector<double> acc(n_out, 0.0);
      std::fill(idx.begin(), idx.end(), 0);
      idx[0] = i0;
      while (true) {
        double w = 1.0;
        for (int a = 0; a < d; ++a) {
          y[a] = rule.nodes[idx[a]];
          w *= rule.weights[idx[a]];
        }
        f(y, vals);
        for (std::size_t k = 0; k < n_out; ++k) acc[k] += w * vals[k];
        int a = d - 1;
        while (a > 0 && ++idx[a] == m) idx[a--] = 0;
        if (a == 0) break;
      }
      slices[i0] = std::move(acc);
    }
  }

  std::vector<double> total(n_out, 0.0);
  for (const auto& s : slices) {
    for (std::size_t k = 0; k < n_out; ++k) total[k] += s[k];
  }
  return total;
}

double max_relative_change(const std::vector<double>& prev, const std::vector<double>& cur) {
  double scale = 0.0;
  for (double v : cur) scale = std::max(scale, std::abs(v));
  const double floor = std::max(1e-14 * scale, 1e-300);
  double worst = 0.0;
  for (std::size_t k = 0; k < cur.size(); ++k) {
    const double diff = std::abs(cur[k] - prev[k]);
    if (!std::isfinite(diff)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, diff / std::max(std::abs(cur[k]), floor));
  }
  return worst;
}

std::vector<double> monte_carlo(const BatchIntegrand& f, std::size_t n_out, double cutoff, int d,
                                const QuadratureSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> u(-cutoff, cutoff);
  std::vector<double> y(static_cast<std::size_t>(d));
  std::vector<double> vals(n_out);
  std::vector<double> acc(n_out, 0.0);
  for (std::int64_t s = 0; s < spec.samples; ++s) {
    for (auto& v : y) v = u(rng);
    f(y, vals);
    for (std::size_t k = 0; k < n_out; ++k) acc[k] += vals[k];
  }
  const double volume = std::pow(2.0 * cutoff, d);
  for (auto& v : acc) v *= volume / static_cast<double>(spec.samples);
  return acc;
}

std::vector<double> finite_box(const BatchIntegrand& f, std::size_t n_out, double cutoff, int d,
                               const QuadratureSpec& spec) {
  if (spec.scheme == QuadratureSpec::Scheme::MonteCarlo) {
    return monte_carlo(f, n_out, cutoff, d, spec);
  }
  int points = spec.points > 0 ? spec.points : default_quad_points(d);
  auto prev = tensor_rule(f, n_out, d, composite_rule(cutoff, points, spec.grading_scale));
  double change = std::numeric_limits<double>::infinity();
  for (int r = 0; r < spec.max_refinements; ++r) {
    points *= 2;
    const auto rule = composite_rule(cutoff, points, spec.grading_scale);
    if (std::pow(static_cast<double>(rule.nodes.size()), d) > kMaxNodes) break;
    auto cur = tensor_rule(f, n_out, d, rule);
    change = max_relative_change(prev, cur);
    prev = std::move(cur);
    if (change < spec.tolerance) return prev;
  }
  throw QuadratureError("refinement did not reach relative tolerance " +
                            std::to_string(spec.tolerance) + " at cutoff " +
                            std::to_string(cutoff),
                        prev.empty() ? 0.0 : prev.front(), change);
}

}  // namespace

std::vector<double> integrate_box_batch(const BatchIntegrand& f, std::size_t n_out, double cutoff,
                                        int d, const QuadratureSpec& spec) {
  check_quadrature(spec, d);
  if (!(cutoff > 0.0)) throw Error(ErrorCode::Config, "cutoff must be positive");
  if (std::isfinite(cutoff)) return finite_box(f, n_out, cutoff, d, spec);

  if (spec.scheme == QuadratureSpec::Scheme::MonteCarlo) {
    throw Error(ErrorCode::Config, "Monte Carlo quadrature needs a finite cutoff");
  }
  double box = spec.initial_cutoff > 0.0 ? spec.initial_cutoff : 1.0;
  auto prev = finite_box(f, n_out, box, d, spec);
  double change = std::numeric_limits<double>::infinity();
  for (int k = 0; k < spec.max_doublings; ++k) {
    box *= 2.0;
    auto cur = finite_box(f, n_out, box, d, spec);
    change = max_relative_change(prev, cur);
    prev = std::move(cur);
    if (change < spec.tolerance) return prev;
  }
  throw QuadratureError("integral did not settle while doubling the cutoff",
                        prev.empty() ? 0.0 : prev.front(), change);
}

double integrate_box(const std::function<double(std::span<const double>)>& f, double cutoff,
                     int d, const QuadratureSpec& spec) {
  auto batch = [&](std::span<const double> y, std::span<double> out) { out[0] = f(y); };
  return integrate_box_batch(batch, 1, cutoff, d, spec).front();
}

}  // namespace nnqft
