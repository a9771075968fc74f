#include "nnqft/snapshot.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nnqft {

using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << v;
  return out.str();
}

std::uint64_t parse_hex64(const std::string& s) { return std::stoull(s, nullptr, 16); }

json arch_json(const ArchitectureSpec& a) {
  return {{"activation", std::string(to_string(a.activation))},
          {"d_in", a.d_in},
          {"d_out", a.d_out},
          {"sigma_w_sq", a.sigma_w_sq},
          {"sigma_b_sq", a.sigma_b_sq}};
}

}  // namespace

std::string to_json(const Snapshot& snap) {
  json doc;
  doc["schema_version"] = Snapshot::kSchemaVersion;
  doc["config_hash"] = hex64(snap.config_hash);
  doc["seed"] = std::to_string(snap.seed);
  doc["width"] = snap.width;
  doc["nets_per_experiment"] = snap.nets_per_experiment;
  doc["architecture"] = arch_json(snap.arch);
  doc["grid"] = {{"label", snap.grid.label}, {"points", snap.grid.points}};
  json exps = json::array();
  for (const auto& acc : snap.experiments) {
    json sums = json::array();
    for (int k = 1; k <= MomentAccumulator::kMaxOrder; ++k) {
      const auto s = acc.sums(k);
      sums.push_back(std::vector<double>(s.begin(), s.end()));
    }
    exps.push_back({{"count", acc.count()}, {"sums", std::move(sums)}});
  }
  doc["experiments"] = std::move(exps);
  return doc.dump(1) + "\n";
}

Snapshot snapshot_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Io, std::string("malformed snapshot: ") + e.what());
  }
  try {
    if (doc.at("schema_version").get<int>() != Snapshot::kSchemaVersion) {
      throw Error(ErrorCode::SnapshotMismatch, "unsupported snapshot schema_version");
    }
    Snapshot snap;
    snap.config_hash = parse_hex64(doc.at("config_hash").get<std::string>());
    snap.seed = std::stoull(doc.at("seed").get<std::string>());
    snap.width = doc.at("width").get<int>();
    snap.nets_per_experiment = doc.at("nets_per_experiment").get<std::int64_t>();
    const auto& a = doc.at("architecture");
    snap.arch.activation = parse_activation(a.at("activation").get<std::string>());
    snap.arch.d_in = a.at("d_in").get<int>();
    snap.arch.d_out = a.at("d_out").get<int>();
    snap.arch.sigma_w_sq = a.at("sigma_w_sq").get<double>();
    snap.arch.sigma_b_sq = a.at("sigma_b_sq").get<double>();
    snap.arch.width = snap.width;
    snap.grid.label = doc.at("grid").at("label").get<std::string>();
    snap.grid.points = doc.at("grid").at("points").get<std::vector<Point>>();
    for (const auto& e : doc.at("experiments")) {
      MomentAccumulator acc(snap.grid.size());
      const auto& sums = e.at("sums");
      if (sums.size() != MomentAccumulator::kMaxOrder) {
        throw Error(ErrorCode::SnapshotMismatch, "snapshot is missing moment orders");
      }
      for (int k = 1; k <= MomentAccumulator::kMaxOrder; ++k) {
        const auto values = sums[k - 1].get<std::vector<double>>();
        auto dst = acc.sums(k);
        if (values.size() != dst.size()) {
          throw Error(ErrorCode::SnapshotMismatch, "snapshot sums do not match the grid size");
        }
        std::copy(values.begin(), values.end(), dst.begin());
      }
      acc.set_count(e.at("count").get<std::int64_t>());
      snap.experiments.push_back(std::move(acc));
    }
    return snap;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("invalid snapshot field: ") + e.what());
  }
}

void write_snapshot(const Snapshot& snap, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write snapshot '" + path + "'");
  out << to_json(snap);
  if (!out) throw Error(ErrorCode::Io, "failed writing snapshot '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open snapshot '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return snapshot_from_json(buf.str());
}

void check_snapshot(const Snapshot& snap, const ExperimentConfig& config) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::SnapshotMismatch, "snapshot " + what + " differs from the config");
  };
  if (snap.config_hash != config.hash) fail("config hash");
  if (snap.seed != config.plan.seed) fail("seed");
  if (snap.arch.activation != config.arch.activation || snap.arch.d_in != config.arch.d_in ||
      snap.arch.sigma_w_sq != config.arch.sigma_w_sq ||
      snap.arch.sigma_b_sq != config.arch.sigma_b_sq) {
    fail("architecture");
  }
  if (snap.grid.points != config.plan.grid.points) fail("grid");
}

}  // namespace nnqft
