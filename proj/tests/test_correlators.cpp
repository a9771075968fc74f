#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "nnqft/correlators.hpp"
#include "nnqft/wick.hpp"

using namespace nnqft;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Exact multivariate Gaussian draws with covariance equal to the Gram matrix.
std::vector<MomentAccumulator> gaussian_ensemble(const SymmetricTensor& gram, int n_exp,
                                                 int draws, std::uint64_t seed) {
  const int g = gram.dim();
  Eigen::MatrixXd cov(g, g);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) cov(i, j) = gram.at({i, j});
  }
  const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<MomentAccumulator> out;
  Eigen::VectorXd z(g);
  std::vector<double> f(g);
  for (int e = 0; e < n_exp; ++e) {
    MomentAccumulator acc(g);
    for (int s = 0; s < draws; ++s) {
      for (int i = 0; i < g; ++i) z(i) = normal(rng);
      const Eigen::VectorXd v = l * z;
      for (int i = 0; i < g; ++i) f[i] = v(i);
      acc.add(f);
    }
    out.push_back(std::move(acc));
  }
  return out;
}

SymmetricTensor erf_gram() {
  const KernelModel k({Activation::Erf, 1, 1, 1, 1.0, 1.0});
  return k.gram(InputGrid{{{-0.8}, {0.1}, {0.5}, {1.2}}, "test"});
}

}  // namespace

TEST_CASE("constant outputs give powers of the constant", "[correlators]") {
  std::vector<MomentAccumulator> acc(3, MomentAccumulator(2));
  for (auto& a : acc) {
    for (int k = 0; k < 4; ++k) a.add(std::vector<double>{2.0, 2.0});
  }
  const auto g4 = empirical_npt(acc, 4);
  CHECK(g4.n_experiments() == 3);
  for (double v : g4.pooled.values()) CHECK(v == 16.0);
  const auto sd = g4.std_dev();
  for (double v : sd.values()) CHECK(v == 0.0);

  MomentAccumulator one(1);
  one.add(std::vector<double>{1.5});
  const SymmetricTensor g2(1, 2, 1.5 * 1.5);
  const auto c4 = connected4(one.mean(4), g2);
  CHECK_THAT(c4[0], WithinRel(-2.0 * std::pow(1.5, 4), 1e-15));
}

TEST_CASE("mismatched accumulators are rejected", "[correlators]") {
  std::vector<MomentAccumulator> acc{MomentAccumulator(2), MomentAccumulator(3)};
  acc[0].add(std::vector<double>{1.0, 1.0});
  acc[1].add(std::vector<double>{1.0, 1.0, 1.0});
  CHECK_THROWS_AS(empirical_npt(acc, 2), Error);
  std::vector<MomentAccumulator> counts{MomentAccumulator(1), MomentAccumulator(1)};
  counts[0].add(std::vector<double>{1.0});
  counts[1].add(std::vector<double>{1.0});
  counts[1].add(std::vector<double>{1.0});
  CHECK_THROWS_AS(empirical_npt(counts, 2), Error);
}

TEST_CASE("gaussian data shows no deviation beyond noise", "[correlators]") {
  const auto gram = erf_gram();
  const auto acc = gaussian_ensemble(gram, 10, 20'000, 99);
  for (int order : {2, 4, 6}) {
    const auto rep = deviation(empirical_npt(acc, order), gp_tensor(gram, order));
    CHECK(rep.mean_abs_m < 3.0 * rep.background);
    for (std::size_t m = 0; m < rep.m.size(); ++m) CHECK(rep.ci_low[m] < rep.ci_high[m]);
  }
  const auto c4 = connected4(empirical_npt(acc, 4), gram);
  const auto sd4 = c4.std_dev();
  for (std::size_t m = 0; m < c4.pooled.size(); ++m) {
    CHECK(std::abs(c4.pooled[m]) < 4.0 * sd4[m] / std::sqrt(10.0) + 1e-12);
  }
  const auto c6 = connected6(empirical_npt(acc, 6), empirical_npt(acc, 4), gram);
  const auto sd6 = c6.std_dev();
  int inside = 0;
  for (std::size_t m = 0; m < c6.pooled.size(); ++m) {
    inside += std::abs(c6.pooled[m]) < 4.0 * sd6[m] / std::sqrt(10.0);
  }
  CHECK(inside >= static_cast<int>(0.95 * c6.pooled.size()));
}

TEST_CASE("exact GP tensors have vanishing connected parts", "[correlators]") {
  const auto gram = erf_gram();
  const auto c4 = connected4(gp_tensor(gram, 4), gram);
  for (double v : c4.values()) CHECK_THAT(v, WithinAbs(0.0, 1e-12));
  const auto c6 = connected6(gp_tensor(gram, 6), gp_tensor(gram, 4), gram);
  for (double v : c6.values()) {
    CHECK_THAT(v, WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("zero GP elements are flagged rather than divided", "[correlators]") {
  auto emp = from_experiments({SymmetricTensor(2, 2, 1.0), SymmetricTensor(2, 2, 3.0)}, 10);
  SymmetricTensor gp(2, 2, 2.0);
  gp[1] = 0.0;
  const auto rep = deviation(emp, gp);
  CHECK(rep.degenerate[1]);
  CHECK_FALSE(rep.degenerate[0]);
  CHECK(rep.m[0] == 0.0);
  CHECK_THAT(rep.m_std[0], WithinRel(std::sqrt(2.0) / 2.0, 1e-15));
}

TEST_CASE("6-point background propagation", "[correlators]") {
  CHECK_THAT(g6_connected_background(3.0, 2.0, 2.0), WithinAbs(5.0, 1e-15));
  CHECK(g6_connected_background(0.0, 0.0, 7.0) == 0.0);
  const SymmetricTensor g2(2, 2, 1.0);
  const SymmetricTensor d6(2, 6, 0.25);
  const SymmetricTensor zero4(2, 4, 0.0);
  CHECK_THAT(g6_connected_background(d6, zero4, g2), WithinAbs(0.25, 1e-15));
  // all 15 spectator terms equal: sqrt(d6^2 + 15 (g2 d4)^2)
  const SymmetricTensor d4(2, 4, 0.5);
  CHECK_THAT(g6_connected_background(d6, d4, g2),
             WithinAbs(std::sqrt(0.0625 + 15.0 * 0.25), 1e-14));
}

TEST_CASE("power-law slopes", "[correlators]") {
  const std::vector<double> n{2, 5, 10, 50, 100, 1000};
  std::vector<double> inv, inv2;
  for (double v : n) {
    inv.push_back(3.7 / v);
    inv2.push_back(-0.2 / (v * v));
  }
  CHECK_THAT(scaling_slope(n, inv).slope, WithinAbs(-1.0, 1e-12));
  CHECK_THAT(scaling_slope(n, inv2).slope, WithinAbs(-2.0, 1e-12));
  const bool mask[] = {true, true, false, false, false, false};
  CHECK_THROWS_AS(scaling_slope(n, inv, mask), Error);
}
