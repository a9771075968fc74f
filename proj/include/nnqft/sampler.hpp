#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <boost/random/mersenne_twister.hpp>
#include <span>
#include <vector>

#include "nnqft/config.hpp"
#include "nnqft/symmetric_tensor.hpp"

namespace nnqft {

/// Same sequence as std::mt19937_64.
using Rng = boost::random::mt19937_64;

/// Parameters of one network. w0 is d_in x width, row-major (w0[i * width + j]).
struct NetworkParams {
  int d_in = 1;
  int width = 1;
  std::vector<double> w0;
  std::vector<double> b0;
  std::vector<double> w1;
  double b1 = 0.0;
};

/// Draws w0 ~ N(0, s_w/d_in), b0 ~ N(0, s_b), w1 ~ N(0, s_w/width), b1 ~ N(0, s_b).
/// With sigma_b_sq = 0 the biases are exactly zero and consume no randomness.
NetworkParams sample_params(const ArchitectureSpec& spec, Rng& rng);
void sample_params_into(const ArchitectureSpec& spec, Rng& rng, NetworkParams& params);

/// Reference single-input evaluation. Throws NumericOverflow on a non-finite result.
double forward(const NetworkParams& params, const ArchitectureSpec& spec,
               std::span<const double> x);

/// Batched evaluation on every grid point; the hot path of the ensemble. No
/// finiteness check is done here.
void forward_grid(const NetworkParams& params, const ArchitectureSpec& spec,
                  const InputGrid& grid, std::span<double> outputs,
                  std::vector<double>& scratch);

/// Streaming sums of output products over all unique index multisets of the
/// grid, for orders 1 through 6.
class MomentAccumulator {
 public:
  static constexpr int kMaxOrder = 6;

  MomentAccumulator() = default;
  explicit MomentAccumulator(int grid_size);

  int grid_size() const { return grid_size_; }
  std::int64_t count() const { return count_; }

  void add(std::span<const double> outputs);
  void merge(const MomentAccumulator& other);

  std::span<const double> sums(int order) const;
  std::span<double> sums(int order);

  /// Raw sums divided by count. Throws InvalidCount when nothing was added.
  SymmetricTensor mean(int order) const;

  /// For restoring from a snapshot.
  void set_count(std::int64_t count) { count_ = count; }

  /// Flat product layout shared by accumulators of the same grid size.
  struct Layout;

 private:

  int grid_size_ = 0;
  std::int64_t count_ = 0;
  std::vector<double> sums_;
  std::vector<double> products_;
  std::shared_ptr<const Layout> layout_;
};

struct EnsembleOptions {
  int threads = 0;  // 0: OpenMP default
  std::int64_t chunk_size = 2048;
};

/// Seed for the RNG stream of one (experiment, chunk) at a given width.
std::uint64_t stream_seed(std::uint64_t seed, int experiment, int width, std::int64_t chunk);

/// Samples `count` networks from one stream and accumulates their moments.
/// `first_index` labels networks in overflow errors.
MomentAccumulator run_chunk(const ArchitectureSpec& spec, const InputGrid& grid,
                            std::uint64_t stream, std::int64_t count, std::int64_t first_index);

/// One accumulator per experiment. Chunks are fixed by `chunk_size` and merged
/// in chunk order, so the result is bit-identical to run_ensemble_serial for
/// any thread count.
std::vector<MomentAccumulator> run_ensemble(const ExperimentPlan& plan,
                                            const ArchitectureSpec& spec, int width,
                                            const EnsembleOptions& options = {});

/// Single-threaded reference with the same chunking.
std::vector<MomentAccumulator> run_ensemble_serial(const ExperimentPlan& plan,
                                                   const ArchitectureSpec& spec, int width,
                                                   const EnsembleOptions& options = {});

}  // namespace nnqft
