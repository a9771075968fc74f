#pragma once

#include <array>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "nnqft/config.hpp"
#include "nnqft/kernels.hpp"
#include "nnqft/symmetric_tensor.hpp"

namespace nnqft {

/// Disjoint index pairs (0-based) covering {0, ..., n-1}; each pair is (lo, hi).
using Pairing = std::vector<std::pair<int, int>>;

inline constexpr int kMaxPairingArity = 12;

/// All (n-1)!! perfect matchings of n points, in canonical order: the smallest
/// free index is paired first, partners ascending.
std::vector<Pairing> enumerate_pairings(int n);

/// (n-1)!! as an integer; 1 for n = 0.
long double_factorial_odd(int n);

/// Sum over pairings of the product of `cov(a, b)`; 0 for odd n. Terms and
/// factors are sorted before a compensated sum, so the result does not depend
/// on how the points are labelled.
double wick_sum(int n, const std::function<double(int, int)>& cov);

/// Gaussian-process n-point function from the kernel.
double gp_npt(const KernelModel& kernel, std::span<const Point> points);

/// GP n-point tensor over a grid from a precomputed Gram tensor.
SymmetricTensor gp_tensor(const SymmetricTensor& gram, int order);

/// One way to set a spectator pair aside from six slots; the remaining four
/// slots feed a quartic vertex.
struct SpectatorSplit {
  std::array<int, 4> quad;
  std::array<int, 2> pair;
};

/// All 15 splits, pairs in lexicographic order.
const std::array<SpectatorSplit, 15>& spectator_splits();

}  // namespace nnqft
