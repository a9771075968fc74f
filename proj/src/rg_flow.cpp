#include "nnqft/rg_flow.hpp"

#include <cmath>

namespace nnqft {

SweepResult cutoff_sweep(const SymmetricTensor& g4, const KernelModel& kernel,
                         const InputGrid& grid, std::span<const double> cutoffs,
                         const QuadratureSpec& quad) {
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (!std::isfinite(cutoffs[i])) {
      throw Error(ErrorCode::Config, "sweep cutoffs must be finite");
    }
    if (i > 0 && cutoffs[i] <= cutoffs[i - 1]) {
      throw Error(ErrorCode::Config, "sweep cutoffs must be strictly increasing");
    }
  }
  SweepResult out;
  out.activation = kernel.spec().activation;
  out.width = kernel.spec().width;
  out.d_in = kernel.spec().d_in;
  if (out.activation == Activation::ReLU && out.d_in >= 1 && out.d_in <= 3) {
    out.theory_slope = beta_theory_relu(out.d_in);
  }
  const auto gram = kernel.gram(grid);
  out.points.resize(cutoffs.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    SweepPoint& p = out.points[i];
    p.cutoff = cutoffs[i];
    try {
      const auto v4 = vertex_tensor(kernel, grid, 4, VertexWeight::One, cutoffs[i], quad);
      const auto lm = extract_lambda_m(g4, gram, v4);
      p.lambda_bar = lambda_bar(lm);
      p.rel_spread = lambda_rel_spread(lm);
      if (!std::isfinite(p.lambda_bar)) p.error = "non-finite lambda_bar";
    } catch (const Error& e) {
      p.error = e.what();
    }
  }
  return out;
}

RgFit fit_rg_slope(const SweepResult& sweep, double min_cutoff) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : sweep.points) {
    if (p.error || p.cutoff < min_cutoff || p.lambda_bar == 0.0) continue;
    xs.push_back(std::log(p.cutoff));
    ys.push_back(std::log(std::abs(p.lambda_bar)));
  }
  if (xs.size() < 4) {
    throw Error(ErrorCode::InsufficientPoints,
                "need at least 4 valid cutoffs >= " + std::to_string(min_cutoff) + ", have " +
                    std::to_string(xs.size()));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  RgFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    rss += r * r;
  }
  fit.stderr_ = std::sqrt(rss / (n - 2.0) / sxx);
  fit.points = static_cast<int>(xs.size());
  return fit;
}

void apply_fit(SweepResult& sweep, double min_cutoff) {
  const auto fit = fit_rg_slope(sweep, min_cutoff);
  sweep.slope = fit.slope;
  sweep.intercept = fit.intercept;
  sweep.slope_stderr = fit.stderr_;
}

double beta_theory_relu(int d_in) {
  if (d_in < 1 || d_in > 3) {
    throw Error(ErrorCode::Config, "the ReLU flow prediction covers d_in = 1, 2, 3");
  }
  return -(d_in + 4.0);
}

double coupling_dimension(double kernel_dim, int k, int d_in) {
  return -static_cast<double>(d_in) - k * kernel_dim / 2.0;
}

std::vector<double> default_rg_cutoffs() {
  return {7,    10,   15,   20,    30,    40,    50,    70,    100,   200,   500,
          1000, 2000, 5000, 7000,  10000, 20000, 40000, 60000, 80000, 100000};
}

}  // namespace nnqft
