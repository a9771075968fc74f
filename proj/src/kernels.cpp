#include "nnqft/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <numbers>

namespace nnqft {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_dims(std::span<const double> x, std::span<const double> xp,
                const ArchitectureSpec& spec) {
  if (static_cast<int>(x.size()) != spec.d_in || static_cast<int>(xp.size()) != spec.d_in) {
    throw Error(ErrorCode::DimensionMismatch, "kernel input dimension differs from d_in");
  }
}

double clamp_unit(double v, const char* what) {
  if (std::abs(v) > 1.0 + kTrigClampTolerance || std::isnan(v)) {
    throw Error(ErrorCode::Domain, std::string(what) + " argument outside [-1, 1]");
  }
  return std::clamp(v, -1.0, 1.0);
}

// First-layer preactivation covariance sigma_b^2 + (sigma_w^2 / d_in) u.v
double preact_cov(std::span<const double> u, std::span<const double> v,
                  const ArchitectureSpec& spec) {
  return spec.sigma_b_sq + spec.sigma_w_sq / spec.d_in * dot(u, v);
}

double erf_w(std::span<const double> x, std::span<const double> xp,
             const ArchitectureSpec& spec) {
  const double cxx = preact_cov(x, x, spec);
  const double cpp = preact_cov(xp, xp, spec);
  const double cxp = preact_cov(x, xp, spec);
  const double arg = 2.0 * cxp / std::sqrt((1.0 + 2.0 * cxx) * (1.0 + 2.0 * cpp));
  return spec.sigma_w_sq * (2.0 / std::numbers::pi) * std::asin(clamp_unit(arg, "arcsin"));
}

double relu_w(std::span<const double> x, std::span<const double> xp,
              const ArchitectureSpec& spec) {
  const double cxx = preact_cov(x, x, spec);
  const double cpp = preact_cov(xp, xp, spec);
  if (cxx <= 0.0 || cpp <= 0.0) {
    throw Error(ErrorCode::DegenerateInput, "relu kernel angle undefined at zero-variance input");
  }
  const double norm = std::sqrt(cxx * cpp);
  const double theta = std::acos(clamp_unit(preact_cov(x, xp, spec) / norm, "arccos"));
  return spec.sigma_w_sq / (2.0 * std::numbers::pi) * norm *
         (std::sin(theta) + (std::numbers::pi - theta) * std::cos(theta));
}

double gauss_w(std::span<const double> x, std::span<const double> xp,
               const ArchitectureSpec& spec) {
  double dist_sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - xp[i];
    dist_sq += d * d;
  }
  return spec.sigma_w_sq * std::exp(-spec.sigma_w_sq * dist_sq / (2.0 * spec.d_in));
}

}  // namespace

double kernel_erf(std::span<const double> x, std::span<const double> xp,
                  const ArchitectureSpec& spec) {
  check_dims(x, xp, spec);
  return spec.sigma_b_sq + erf_w(x, xp, spec);
}

double kernel_relu(std::span<const double> x, std::span<const double> xp,
                   const ArchitectureSpec& spec) {
  check_dims(x, xp, spec);
  return spec.sigma_b_sq + relu_w(x, xp, spec);
}

double kernel_gauss(std::span<const double> x, std::span<const double> xp,
                    const ArchitectureSpec& spec) {
  check_dims(x, xp, spec);
  return spec.sigma_b_sq + gauss_w(x, xp, spec);
}

double kernel_w(std::span<const double> x, std::span<const double> xp,
                const ArchitectureSpec& spec) {
  check_dims(x, xp, spec);
  switch (spec.activation) {
    case Activation::Erf: return erf_w(x, xp, spec);
    case Activation::ReLU: return relu_w(x, xp, spec);
    case Activation::Gauss: return gauss_w(x, xp, spec);
  }
  return 0.0;
}

KernelModel::KernelModel(ArchitectureSpec spec) : spec_(spec) { validate(spec_); }

double KernelModel::weight_part(std::span<const double> x, std::span<const double> xp) const {
  return kernel_w(x, xp, spec_);
}

double KernelModel::length_scale() const { return std::sqrt(spec_.d_in / spec_.sigma_w_sq); }

SymmetricTensor KernelModel::gram(const InputGrid& grid) const {
  return SymmetricTensor::generate(grid.size(), 2, [&](std::span<const int> ij) {
    return (*this)(grid.points[ij[0]], grid.points[ij[1]]);
  });
}

SymmetricTensor KernelModel::gram_w(const InputGrid& grid) const {
  return SymmetricTensor::generate(grid.size(), 2, [&](std::span<const int> ij) {
    return weight_part(grid.points[ij[0]], grid.points[ij[1]]);
  });
}

}  // namespace nnqft
