// Batched forward pass. Built with vectorized math (see src/CMakeLists.txt);
// finiteness of the outputs is checked by the caller.
#include <cmath>

#include "nnqft/sampler.hpp"

namespace nnqft {

void forward_grid(const NetworkParams& params, const ArchitectureSpec& spec,
                  const InputGrid& grid, std::span<double> outputs,
                  std::vector<double>& scratch) {
  const int n = params.width;
  const int d = params.d_in;
  scratch.resize(static_cast<std::size_t>(n));
  double* __restrict act = scratch.data();
  const double* __restrict w0 = params.w0.data();
  const double* __restrict b0 = params.b0.data();
  const double* __restrict w1 = params.w1.data();

  for (int p = 0; p < grid.size(); ++p) {
    const double* x = grid.points[p].data();
    for (int j = 0; j < n; ++j) act[j] = b0[j];
    for (int i = 0; i < d; ++i) {
      const double xi = x[i];
      const double* row = w0 + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) act[j] += row[j] * xi;
    }
    switch (spec.activation) {
      case Activation::Erf:
#pragma omp simd
        for (int j = 0; j < n; ++j) act[j] = std::erf(act[j]);
        break;
      case Activation::ReLU:
        for (int j = 0; j < n; ++j) act[j] = act[j] > 0.0 ? act[j] : 0.0;
        break;
      case Activation::Gauss: {
        double norm_sq = 0.0;
        for (int i = 0; i < d; ++i) norm_sq += x[i] * x[i];
        const double shift = spec.sigma_b_sq + spec.sigma_w_sq * norm_sq / d;
#pragma omp simd
        for (int j = 0; j < n; ++j) act[j] = std::exp(act[j] - shift);
        break;
      }
    }
    double f = 0.0;
#pragma omp simd reduction(+ : f)
    for (int j = 0; j < n; ++j) f += w1[j] * act[j];
    outputs[p] = f + params.b1;
  }
}

}  // namespace nnqft
