#include "nnqft/symmetric_tensor.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <utility>

#include "nnqft/errors.hpp"

namespace nnqft {

namespace {

// C(n, k) for the small arguments used here.
std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Sequences of length `len` over `values` distinct values, non-decreasing.
std::size_t nondecreasing(int values, int len) {
  if (len == 0) return 1;
  if (values <= 0) return 0;
  return binomial(static_cast<std::size_t>(values + len - 1), static_cast<std::size_t>(len));
}

std::shared_ptr<const std::vector<std::vector<int>>> cached_tuples(int dim, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const std::vector<std::vector<int>>>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{dim, order}];
  if (!slot) slot = std::make_shared<const std::vector<std::vector<int>>>(multisets(dim, order));
  return slot;
}

}  // namespace

std::size_t multiset_count(int dim, int order) { return nondecreasing(dim, order); }

std::size_t multiset_rank(int dim, std::span<const int> sorted) {
  const int order = static_cast<int>(sorted.size());
  std::size_t rank = 0;
  int prev = 0;
  for (int p = 0; p < order; ++p) {
    for (int v = prev; v < sorted[p]; ++v) rank += nondecreasing(dim - v, order - p - 1);
    prev = sorted[p];
  }
  return rank;
}

std::vector<std::vector<int>> multisets(int dim, int order) {
  std::vector<std::vector<int>> out;
  out.reserve(multiset_count(dim, order));
  std::vector<int> cur(static_cast<std::size_t>(order), 0);
  if (dim <= 0) return out;
  while (true) {
    out.push_back(cur);
    int p = order - 1;
    while (p >= 0 && cur[p] == dim - 1) --p;
    if (p < 0) break;
    ++cur[p];
    for (int q = p + 1; q < order; ++q) cur[q] = cur[p];
  }
  return out;
}

SymmetricTensor::SymmetricTensor(int dim, int order, double fill)
    : dim_(dim),
      order_(order),
      values_(multiset_count(dim, order), fill),
      tuples_(cached_tuples(dim, order)) {}

std::size_t SymmetricTensor::locate(std::span<const int> indices) const {
  if (static_cast<int>(indices.size()) != order_) {
    throw Error(ErrorCode::DimensionMismatch, "tensor index arity does not match order");
  }
  std::vector<int> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty() && (sorted.front() < 0 || sorted.back() >= dim_)) {
    throw Error(ErrorCode::DimensionMismatch, "tensor index out of range");
  }
  return multiset_rank(dim_, sorted);
}

double SymmetricTensor::at(std::span<const int> indices) const { return values_[locate(indices)]; }
double& SymmetricTensor::at(std::span<const int> indices) { return values_[locate(indices)]; }
double SymmetricTensor::at(std::initializer_list<int> indices) const {
  return at(std::span<const int>(indices.begin(), indices.size()));
}

const std::vector<int>& SymmetricTensor::indices(std::size_t unique) const {
  return (*tuples_)[unique];
}

double SymmetricTensor::mean() const {
  if (values_.empty()) return 0.0;
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

SymmetricTensor SymmetricTensor::generate(int dim, int order,
                                          const std::function<double(std::span<const int>)>& f) {
  SymmetricTensor out(dim, order);
  for (std::size_t i = 0; i < out.size(); ++i) out.values_[i] = f(out.indices(i));
  return out;
}

void SymmetricTensor::check_same_shape(const SymmetricTensor& a, const SymmetricTensor& b) {
  if (a.dim_ != b.dim_ || a.order_ != b.order_) {
    throw Error(ErrorCode::DimensionMismatch, "tensor shapes differ");
  }
}

}  // namespace nnqft
