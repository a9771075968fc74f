#pragma once

#include <span>

#include "nnqft/config.hpp"
#include "nnqft/symmetric_tensor.hpp"

namespace nnqft {

/// Tolerance beyond which an arcsin/arccos argument outside [-1, 1] is a hard
/// error rather than roundoff to be clamped.
inline constexpr double kTrigClampTolerance = 1e-9;

/// Arcsine kernel of the erf network. For d_in > 1 the products are dot products.
double kernel_erf(std::span<const double> x, std::span<const double> xp,
                  const ArchitectureSpec& spec);

/// Arc-cosine (order 1) kernel of the ReLU network. Throws DegenerateInput when
/// either input has zero first-layer variance.
double kernel_relu(std::span<const double> x, std::span<const double> xp,
                   const ArchitectureSpec& spec);

/// Translation-invariant kernel of the normalized-exponential network.
double kernel_gauss(std::span<const double> x, std::span<const double> xp,
                    const ArchitectureSpec& spec);

/// K(x, x') - sigma_b^2, evaluated directly for the spec's activation.
double kernel_w(std::span<const double> x, std::span<const double> xp,
                const ArchitectureSpec& spec);

/// Exact two-point function of a single-hidden-layer architecture at any
/// width, split as K = K_b + K_W with K_b = sigma_b^2 constant.
///
/// The inverse kernel (the quadratic form of the GP log-likelihood) is never
/// built; every downstream formula is written in terms of K and K_W.
class KernelModel {
 public:
  explicit KernelModel(ArchitectureSpec spec);

  const ArchitectureSpec& spec() const { return spec_; }

  double operator()(std::span<const double> x, std::span<const double> xp) const {
    return bias_part() + weight_part(x, xp);
  }
  double weight_part(std::span<const double> x, std::span<const double> xp) const;
  double bias_part() const { return spec_.sigma_b_sq; }

  /// True when K_W decays at large separation (only the Gauss kernel).
  bool decays() const { return spec_.activation == Activation::Gauss; }

  /// Characteristic input scale sqrt(d_in / sigma_w_sq).
  double length_scale() const;

  /// Full kernel over a grid as an order-2 tensor.
  SymmetricTensor gram(const InputGrid& grid) const;
  SymmetricTensor gram_w(const InputGrid& grid) const;

 private:
  ArchitectureSpec spec_;
};

}  // namespace nnqft
