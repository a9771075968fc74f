#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

namespace nnqft {

/// Number of non-decreasing index tuples of length `order` over `dim` values.
std::size_t multiset_count(int dim, int order);

/// Position of a non-decreasing tuple in lexicographic order.
std::size_t multiset_rank(int dim, std::span<const int> sorted);

/// All non-decreasing tuples in lexicographic order.
std::vector<std::vector<int>> multisets(int dim, int order);

/// Fully symmetric rank-`order` tensor over `dim` points, stored once per
/// unique index multiset so symmetry holds by construction.
class SymmetricTensor {
 public:
  SymmetricTensor() = default;
  SymmetricTensor(int dim, int order, double fill = 0.0);

  int dim() const { return dim_; }
  int order() const { return order_; }
  std::size_t size() const { return values_.size(); }

  /// Any index order; indices are sorted internally.
  double at(std::span<const int> indices) const;
  double& at(std::span<const int> indices);
  double at(std::initializer_list<int> indices) const;

  double operator[](std::size_t unique) const { return values_[unique]; }
  double& operator[](std::size_t unique) { return values_[unique]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Sorted index tuple of the unique element at position `unique`.
  const std::vector<int>& indices(std::size_t unique) const;

  /// Mean over unique elements.
  double mean() const;

  /// Elementwise combination; shapes must match.
  template <typename F>
  static SymmetricTensor zip(const SymmetricTensor& a, const SymmetricTensor& b, F&& f) {
    check_same_shape(a, b);
    SymmetricTensor out(a.dim_, a.order_);
    for (std::size_t i = 0; i < a.size(); ++i) out.values_[i] = f(a.values_[i], b.values_[i]);
    return out;
  }

  /// Fills every unique element from its sorted index tuple.
  static SymmetricTensor generate(int dim, int order,
                                  const std::function<double(std::span<const int>)>& f);

  static void check_same_shape(const SymmetricTensor& a, const SymmetricTensor& b);

 private:
  std::size_t locate(std::span<const int> indices) const;

  int dim_ = 0;
  int order_ = 0;
  std::vector<double> values_;
  std::shared_ptr<const std::vector<std::vector<int>>> tuples_;
};

}  // namespace nnqft
