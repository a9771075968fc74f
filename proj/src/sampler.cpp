#include "nnqft/sampler.hpp"

#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <string>

#include <boost/random/normal_distribution.hpp>

#include <omp.h>

namespace nnqft {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void fill_normal(Rng& rng, std::vector<double>& out, std::size_t n, double sd) {
  out.resize(n);
  if (sd == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : out) v = sd * normal(rng);
}

double activate(Activation a, double z, double gauss_shift) {
  switch (a) {
    case Activation::Erf: return std::erf(z);
    case Activation::ReLU: return z > 0.0 ? z : 0.0;
    case Activation::Gauss: return std::exp(z - gauss_shift);
  }
  return 0.0;
}

}  // namespace

void sample_params_into(const ArchitectureSpec& spec, Rng& rng, NetworkParams& params) {
  const auto n = static_cast<std::size_t>(spec.width);
  params.d_in = spec.d_in;
  params.width = spec.width;
  const double sd_w0 = std::sqrt(spec.sigma_w_sq / spec.d_in);
  const double sd_w1 = std::sqrt(spec.sigma_w_sq / spec.width);
  const double sd_b = std::sqrt(spec.sigma_b_sq);
  fill_normal(rng, params.w0, n * static_cast<std::size_t>(spec.d_in), sd_w0);
  fill_normal(rng, params.b0, n, sd_b);
  fill_normal(rng, params.w1, n, sd_w1);
  if (sd_b == 0.0) {
    params.b1 = 0.0;
  } else {
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    params.b1 = sd_b * normal(rng);
  }
}

NetworkParams sample_params(const ArchitectureSpec& spec, Rng& rng) {
  NetworkParams params;
  sample_params_into(spec, rng, params);
  return params;
}

double forward(const NetworkParams& params, const ArchitectureSpec& spec,
               std::span<const double> x) {
  if (static_cast<int>(x.size()) != params.d_in) {
    throw Error(ErrorCode::DimensionMismatch, "input dimension differs from d_in");
  }
  double norm_sq = 0.0;
  for (double v : x) norm_sq += v * v;
  const double shift = spec.sigma_b_sq + spec.sigma_w_sq * norm_sq / params.d_in;
  double f = params.b1;
  for (int j = 0; j < params.width; ++j) {
    double z = params.b0[j];
    for (int i = 0; i < params.d_in; ++i) z += params.w0[i * params.width + j] * x[i];
    f += params.w1[j] * activate(spec.activation, z, shift);
  }
  if (!std::isfinite(f)) throw Error(ErrorCode::NumericOverflow, "non-finite network output");
  return f;
}

// ---------------------------------------------------------------------------

struct MomentAccumulator::Layout {
  std::array<std::size_t, kMaxOrder + 2> offset{};  // offset[k] = start of order k
  std::vector<std::size_t> parent;                  // flat index of the order-(k-1) prefix
  std::vector<int> last;                            // final grid index of the tuple
};

namespace {

std::shared_ptr<const MomentAccumulator::Layout> layout_for(int grid_size);

}  // namespace

MomentAccumulator::MomentAccumulator(int grid_size)
    : grid_size_(grid_size), layout_(layout_for(grid_size)) {
  sums_.assign(layout_->offset[kMaxOrder + 1], 0.0);
  products_.assign(sums_.size(), 0.0);
}

namespace {

std::shared_ptr<const MomentAccumulator::Layout> layout_for(int grid_size) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const MomentAccumulator::Layout>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[grid_size];
  if (slot) return slot;
  auto layout = std::make_shared<MomentAccumulator::Layout>();
  constexpr int kMax = MomentAccumulator::kMaxOrder;
  layout->offset[0] = 0;
  layout->offset[1] = 0;
  for (int k = 1; k <= kMax; ++k) {
    layout->offset[k + 1] = layout->offset[k] + multiset_count(grid_size, k);
  }
  layout->parent.resize(layout->offset[kMax + 1]);
  layout->last.resize(layout->offset[kMax + 1]);
  for (int k = 1; k <= kMax; ++k) {
    const auto tuples = multisets(grid_size, k);
    for (std::size_t m = 0; m < tuples.size(); ++m) {
      const std::size_t flat = layout->offset[k] + m;
      layout->last[flat] = tuples[m].back();
      if (k > 1) {
        std::span<const int> prefix(tuples[m].data(), tuples[m].size() - 1);
        layout->parent[flat] = layout->offset[k - 1] + multiset_rank(grid_size, prefix);
      }
    }
  }
  slot = std::move(layout);
  return slot;
}

}  // namespace

void MomentAccumulator::add(std::span<const double> outputs) {
  const Layout& L = *layout_;
  double* __restrict prod = products_.data();
  double* __restrict sum = sums_.data();
  for (int i = 0; i < grid_size_; ++i) prod[i] = outputs[i];
  const std::size_t total = L.offset[kMaxOrder + 1];
  for (std::size_t m = static_cast<std::size_t>(grid_size_); m < total; ++m) {
    prod[m] = prod[L.parent[m]] * outputs[L.last[m]];
  }
  for (std::size_t m = 0; m < total; ++m) sum[m] += prod[m];
  ++count_;
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.grid_size_ != grid_size_) {
    throw Error(ErrorCode::DimensionMismatch, "cannot merge accumulators over different grids");
  }
  for (std::size_t m = 0; m < sums_.size(); ++m) sums_[m] += other.sums_[m];
  count_ += other.count_;
}

std::span<const double> MomentAccumulator::sums(int order) const {
  const auto& off = layout_->offset;
  return std::span<const double>(sums_).subspan(off[order], off[order + 1] - off[order]);
}

std::span<double> MomentAccumulator::sums(int order) {
  const auto& off = layout_->offset;
  return std::span<double>(sums_).subspan(off[order], off[order + 1] - off[order]);
}

SymmetricTensor MomentAccumulator::mean(int order) const {
  if (order < 1 || order > kMaxOrder) {
    throw Error(ErrorCode::Config, "moment order must be in 1..6");
  }
  if (count_ <= 0) throw Error(ErrorCode::InvalidCount, "empty moment accumulator");
  SymmetricTensor out(grid_size_, order);
  const auto s = sums(order);
  for (std::size_t m = 0; m < s.size(); ++m) out[m] = s[m] / static_cast<double>(count_);
  return out;
}

// ---------------------------------------------------------------------------

std::uint64_t stream_seed(std::uint64_t seed, int experiment, int width, std::int64_t chunk) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(experiment));
  h = splitmix64(h ^ static_cast<std::uint64_t>(width));
  return splitmix64(h ^ static_cast<std::uint64_t>(chunk));
}

MomentAccumulator run_chunk(const ArchitectureSpec& spec, const InputGrid& grid,
                            std::uint64_t stream, std::int64_t count, std::int64_t first_index) {
  Rng rng(stream);
  MomentAccumulator acc(grid.size());
  NetworkParams params;
  std::vector<double> outputs(static_cast<std::size_t>(grid.size()));
  std::vector<double> scratch;
  for (std::int64_t k = 0; k < count; ++k) {
    sample_params_into(spec, rng, params);
    forward_grid(params, spec, grid, outputs, scratch);
    for (double f : outputs) {
      if (!std::isfinite(f)) {
        throw Error(ErrorCode::NumericOverflow,
                    "non-finite output from network " + std::to_string(first_index + k));
      }
    }
    acc.add(outputs);
  }
  return acc;
}

namespace {

struct ChunkTask {
  int experiment;
  std::int64_t chunk;
  std::int64_t count;
};

std::vector<ChunkTask> plan_chunks(const ExperimentPlan& plan, std::int64_t chunk_size) {
  if (chunk_size < 1) throw Error(ErrorCode::InvalidCount, "chunk_size must be positive");
  std::vector<ChunkTask> tasks;
  for (int e = 0; e < plan.n_experiments; ++e) {
    for (std::int64_t start = 0, c = 0; start < plan.nets_per_experiment; start += chunk_size, ++c) {
      tasks.push_back({e, c, std::min(chunk_size, plan.nets_per_experiment - start)});
    }
  }
  return tasks;
}

ArchitectureSpec prepared(const ExperimentPlan& plan, const ArchitectureSpec& spec, int width) {
  ArchitectureSpec s = spec.with_width(width);
  validate(plan, s);
  return s;
}

}  // namespace

std::vector<MomentAccumulator> run_ensemble_serial(const ExperimentPlan& plan,
                                                   const ArchitectureSpec& spec, int width,
                                                   const EnsembleOptions& options) {
  const ArchitectureSpec s = prepared(plan, spec, width);
  std::vector<MomentAccumulator> out;
  for (const auto& t : plan_chunks(plan, options.chunk_size)) {
    auto acc = run_chunk(s, plan.grid, stream_seed(plan.seed, t.experiment, width, t.chunk),
                         t.count, t.chunk * options.chunk_size);
    if (t.chunk == 0) {
      out.push_back(std::move(acc));
    } else {
      out.back().merge(acc);
    }
  }
  return out;
}

std::vector<MomentAccumulator> run_ensemble(const ExperimentPlan& plan,
                                            const ArchitectureSpec& spec, int width,
                                            const EnsembleOptions& options) {
  const ArchitectureSpec s = prepared(plan, spec, width);
  const auto tasks = plan_chunks(plan, options.chunk_size);
  std::vector<MomentAccumulator> partial(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    try {
      partial[i] = run_chunk(s, plan.grid, stream_seed(plan.seed, t.experiment, width, t.chunk),
                             t.count, t.chunk * options.chunk_size);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<MomentAccumulator> out;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].chunk == 0) {
      out.push_back(std::move(partial[i]));
    } else {
      out.back().merge(partial[i]);
    }
  }
  return out;
}

}  // namespace nnqft
