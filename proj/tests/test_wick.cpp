#include <catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <numeric>
#include <set>

#include "nnqft/wick.hpp"

using namespace nnqft;
using Catch::Matchers::WithinRel;

TEST_CASE("pairing counts are odd double factorials", "[wick]") {
  const std::array<long, 7> expect{1, 1, 3, 15, 105, 945, 10395};
  for (int n = 2; n <= 12; n += 2) {
    CHECK(static_cast<long>(enumerate_pairings(n).size()) == expect[n / 2]);
  }
  for (int n = 0; n <= 12; n += 2) CHECK(double_factorial_odd(n) == expect[n / 2]);
  CHECK_THROWS_AS(enumerate_pairings(5), Error);
  CHECK_THROWS_AS(enumerate_pairings(14), Error);
}

TEST_CASE("every pairing is a perfect matching and none repeat", "[wick]") {
  const auto all = enumerate_pairings(8);
  std::set<Pairing> seen(all.begin(), all.end());
  CHECK(seen.size() == all.size());
  for (const auto& p : all) {
    std::vector<int> used;
    for (auto [a, b] : p) {
      CHECK(a < b);
      used.push_back(a);
      used.push_back(b);
    }
    std::sort(used.begin(), used.end());
    std::vector<int> want(8);
    std::iota(want.begin(), want.end(), 0);
    CHECK(used == want);
  }
}

TEST_CASE("wick sums match written-out expansions", "[wick]") {
  const double k[6][6] = {{1.0, 0.3, 0.2, 0.1, 0.5, 0.7}, {0.3, 2.0, 0.4, 0.6, 0.9, 0.8},
                          {0.2, 0.4, 1.5, 0.35, 0.15, 0.45}, {0.1, 0.6, 0.35, 1.2, 0.55, 0.25},
                          {0.5, 0.9, 0.15, 0.55, 1.8, 0.65}, {0.7, 0.8, 0.45, 0.25, 0.65, 1.1}};
  auto c = [&](int a, int b) { return k[a][b]; };
  const double four = k[0][1] * k[2][3] + k[0][2] * k[1][3] + k[0][3] * k[1][2];
  CHECK_THAT(wick_sum(4, c), WithinRel(four, 1e-15));

  double six = 0.0;
  // partner of 0, then the three pairings of the remaining four
  const int rest[5][4] = {{2, 3, 4, 5}, {1, 3, 4, 5}, {1, 2, 4, 5}, {1, 2, 3, 5}, {1, 2, 3, 4}};
  for (int p = 1; p <= 5; ++p) {
    const auto* r = rest[p - 1];
    six += k[0][p] * (k[r[0]][r[1]] * k[r[2]][r[3]] + k[r[0]][r[2]] * k[r[1]][r[3]] +
                      k[r[0]][r[3]] * k[r[1]][r[2]]);
  }
  CHECK_THAT(wick_sum(6, c), WithinRel(six, 1e-14));
  CHECK(wick_sum(3, c) == 0.0);
}

TEST_CASE("constant covariance gives (n-1)!! c^(n/2)", "[wick]") {
  for (int n = 2; n <= 12; n += 2) {
    CHECK_THAT(wick_sum(n, [](int, int) { return 1.3; }),
               WithinRel(double_factorial_odd(n) * std::pow(1.3, n / 2), 1e-13));
  }
}

TEST_CASE("gp n-point functions are permutation invariant", "[wick]") {
  const KernelModel kernel({Activation::Erf, 1, 1, 1, 1.0, 1.0});
  std::vector<Point> pts{{0.1}, {-0.4}, {0.9}, {0.25}, {-1.3}, {0.6}};
  const double ref = gp_npt(kernel, pts);
  std::vector<int> perm{0, 1, 2, 3, 4, 5};
  int checked = 0;
  while (std::next_permutation(perm.begin(), perm.end())) {
    if (++checked % 37 != 0) continue;
    std::vector<Point> q;
    for (int i : perm) q.push_back(pts[i]);
    CHECK(gp_npt(kernel, q) == ref);
  }
}

TEST_CASE("gp tensor agrees with pointwise evaluation", "[wick]") {
  const KernelModel kernel({Activation::Gauss, 1, 1, 1, 1.0, 1.0});
  const auto grid = builtin_grid(GridName::GaussDefault);
  const auto gram = kernel.gram(grid);
  for (int order : {2, 4, 6}) {
    const auto t = gp_tensor(gram, order);
    for (std::size_t m = 0; m < t.size(); m += 7) {
      std::vector<Point> pts;
      for (int i : t.indices(m)) pts.push_back(grid.points[i]);
      CHECK_THAT(t[m], WithinRel(gp_npt(kernel, pts), 1e-13));
    }
  }
}

TEST_CASE("spectator splits cover six slots fifteen ways", "[wick]") {
  const auto& s = spectator_splits();
  std::set<std::pair<int, int>> pairs;
  for (const auto& split : s) {
    pairs.insert({split.pair[0], split.pair[1]});
    std::vector<int> all(split.quad.begin(), split.quad.end());
    all.push_back(split.pair[0]);
    all.push_back(split.pair[1]);
    std::sort(all.begin(), all.end());
    CHECK(all == std::vector<int>{0, 1, 2, 3, 4, 5});
  }
  CHECK(pairs.size() == 15);
}
