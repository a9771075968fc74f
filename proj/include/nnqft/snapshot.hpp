#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nnqft/config.hpp"
#include "nnqft/sampler.hpp"

namespace nnqft {

/// Moment sums of every experiment at one width, enough to rerun any
/// analysis without sampling again.
struct Snapshot {
  static constexpr int kSchemaVersion = 1;

  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  int width = 0;
  std::int64_t nets_per_experiment = 0;
  ArchitectureSpec arch;
  InputGrid grid;
  std::vector<MomentAccumulator> experiments;
};

/// Deterministic JSON text; equal snapshots serialize to equal bytes.
std::string to_json(const Snapshot& snap);
Snapshot snapshot_from_json(const std::string& text);

void write_snapshot(const Snapshot& snap, const std::string& path);
Snapshot read_snapshot(const std::string& path);

/// Throws SnapshotMismatch unless the snapshot was produced from `config`
/// (same hash, seed, architecture and grid).
void check_snapshot(const Snapshot& snap, const ExperimentConfig& config);

}  // namespace nnqft
