#include "nnqft/wick.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "nnqft/errors.hpp"

namespace nnqft {

namespace {

void check_arity(int n) {
  if (n <= 0 || n % 2 != 0) {
    throw Error(ErrorCode::OddArity, "pairings need a positive even number of points, got " +
                                         std::to_string(n));
  }
  if (n > kMaxPairingArity) {
    throw Error(ErrorCode::SizeLimit, "pairing enumeration capped at " +
                                          std::to_string(kMaxPairingArity) + " points");
  }
}

void extend(std::vector<bool>& used, Pairing& current, std::vector<Pairing>& out) {
  const int n = static_cast<int>(used.size());
  int first = 0;
  while (first < n && used[first]) ++first;
  if (first == n) {
    out.push_back(current);
    return;
  }
  used[first] = true;
  for (int partner = first + 1; partner < n; ++partner) {
    if (used[partner]) continue;
    used[partner] = true;
    current.emplace_back(first, partner);
    extend(used, current, out);
    current.pop_back();
    used[partner] = false;
  }
  used[first] = false;
}

// Neumaier's variant of Kahan summation.
double compensated_sum(std::span<const double> terms) {
  double sum = 0.0;
  double c = 0.0;
  for (double t : terms) {
    const double s = sum + t;
    if (std::abs(sum) >= std::abs(t)) {
      c += (sum - s) + t;
    } else {
      c += (t - s) + sum;
    }
    sum = s;
  }
  return sum + c;
}

const std::vector<Pairing>& cached_pairings(int n) {
  static const std::array<std::vector<Pairing>, kMaxPairingArity / 2 + 1> table = [] {
    std::array<std::vector<Pairing>, kMaxPairingArity / 2 + 1> t;
    for (int k = 1; k <= kMaxPairingArity / 2; ++k) t[k] = enumerate_pairings(2 * k);
    return t;
  }();
  return table[n / 2];
}

}  // namespace

std::vector<Pairing> enumerate_pairings(int n) {
  check_arity(n);
  std::vector<Pairing> out;
  out.reserve(static_cast<std::size_t>(double_factorial_odd(n)));
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  Pairing current;
  extend(used, current, out);
  return out;
}

long double_factorial_odd(int n) {
  long r = 1;
  for (int k = n - 1; k > 1; k -= 2) r *= k;
  return r;
}

double wick_sum(int n, const std::function<double(int, int)>& cov) {
  if (n % 2 != 0) return 0.0;
  check_arity(n);
  const auto& pairings = cached_pairings(n);
  std::vector<double> terms;
  terms.reserve(pairings.size());
  std::vector<double> factors(static_cast<std::size_t>(n / 2));
  for (const auto& pairing : pairings) {
    for (std::size_t k = 0; k < pairing.size(); ++k) {
      factors[k] = cov(pairing[k].first, pairing[k].second);
    }
    std::sort(factors.begin(), factors.end());
    double product = 1.0;
    for (double f : factors) product *= f;
    terms.push_back(product);
  }
  std::sort(terms.begin(), terms.end());
  return compensated_sum(terms);
}

double gp_npt(const KernelModel& kernel, std::span<const Point> points) {
  const int n = static_cast<int>(points.size());
  if (n % 2 != 0) return 0.0;
  return wick_sum(n, [&](int a, int b) { return kernel(points[a], points[b]); });
}

SymmetricTensor gp_tensor(const SymmetricTensor& gram, int order) {
  return SymmetricTensor::generate(gram.dim(), order, [&](std::span<const int> idx) {
    return wick_sum(order, [&](int a, int b) { return gram.at({idx[a], idx[b]}); });
  });
}

const std::array<SpectatorSplit, 15>& spectator_splits() {
  static const auto splits = [] {
    // every pair of six slots occurs in some perfect matching
    std::set<std::pair<int, int>> pairs;
    for (const auto& pairing : enumerate_pairings(6)) pairs.insert(pairing.begin(), pairing.end());
    std::array<SpectatorSplit, 15> out{};
    std::size_t n = 0;
    for (const auto& [e, f] : pairs) {
      SpectatorSplit s{};
      s.pair = {e, f};
      int q = 0;
      for (int k = 0; k < 6; ++k) {
        if (k != e && k != f) s.quad[q++] = k;
      }
      out.at(n++) = s;
    }
    return out;
  }();
  return splits;
}

}  // namespace nnqft
