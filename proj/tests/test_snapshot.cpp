#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "nnqft/snapshot.hpp"

using namespace nnqft;

namespace {

ExperimentConfig small_config() {
  return parse_config(R"({"schema_version": 1,
    "architecture": {"activation": "gauss", "sigma_w_sq": 1, "sigma_b_sq": 1},
    "plan": {"n_experiments": 2, "nets_per_experiment": 300, "widths": [7],
             "seed": "18446744073709551557", "grid": "gauss-default"}})");
}

Snapshot make_snapshot(const ExperimentConfig& cfg) {
  Snapshot s;
  s.config_hash = cfg.hash;
  s.seed = cfg.plan.seed;
  s.width = 7;
  s.nets_per_experiment = cfg.plan.nets_per_experiment;
  s.arch = cfg.arch.with_width(7);
  s.grid = cfg.plan.grid;
  s.experiments = run_ensemble(cfg.plan, s.arch, 7);
  return s;
}

}  // namespace

TEST_CASE("snapshots round-trip byte for byte", "[snapshot]") {
  const auto cfg = small_config();
  const auto snap = make_snapshot(cfg);
  const auto text = to_json(snap);
  const auto back = snapshot_from_json(text);
  CHECK(to_json(back) == text);
  CHECK(back.seed == 18446744073709551557ULL);
  CHECK(back.experiments[1].count() == 300);
  for (int k = 1; k <= MomentAccumulator::kMaxOrder; ++k) {
    CHECK(std::ranges::equal(back.experiments[0].sums(k), snap.experiments[0].sums(k)));
  }
  CHECK(to_json(make_snapshot(cfg)) == text);

  const auto path = std::filesystem::temp_directory_path() / "nnqft_snapshot_test.json";
  write_snapshot(snap, path.string());
  CHECK(to_json(read_snapshot(path.string())) == text);
  std::filesystem::remove(path);
}

TEST_CASE("snapshots from another config are refused", "[snapshot]") {
  const auto cfg = small_config();
  const auto snap = make_snapshot(cfg);
  CHECK_NOTHROW(check_snapshot(snap, cfg));
  auto other = cfg;
  other.hash ^= 1;
  try {
    check_snapshot(snap, other);
    FAIL("expected a mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SnapshotMismatch);
  }
  auto seed = cfg;
  seed.plan.seed += 1;
  CHECK_THROWS_AS(check_snapshot(snap, seed), Error);
  CHECK_THROWS_AS(read_snapshot("/nonexistent/snap.json"), Error);
  CHECK_THROWS_AS(snapshot_from_json("{not json"), Error);
}
