#include <benchmark/benchmark.h>

#include "nnqft/eft.hpp"
#include "nnqft/sampler.hpp"

using namespace nnqft;

namespace {

ExperimentPlan plan_for(const InputGrid& grid, int width) {
  ExperimentPlan plan;
  plan.n_experiments = 2;
  plan.nets_per_experiment = 20'000;
  plan.widths = {width};
  plan.seed = 1;
  plan.grid = grid;
  return plan;
}

ArchitectureSpec spec_for(Activation act, int width) {
  return {act, 1, 1, width, 1.0, act == Activation::ReLU ? 0.0 : 1.0};
}

GridName grid_for(Activation act) {
  switch (act) {
    case Activation::Erf:
      return GridName::ErfDefault;
    case Activation::ReLU:
      return GridName::ReluDefault;
    default:
      return GridName::GaussDefault;
  }
}

void BM_EnsembleSerial(benchmark::State& state) {
  const auto act = static_cast<Activation>(state.range(0));
  const int width = static_cast<int>(state.range(1));
  const auto plan = plan_for(builtin_grid(grid_for(act)), width);
  const auto spec = spec_for(act, width);
  for (auto _ : state) benchmark::DoNotOptimize(run_ensemble_serial(plan, spec, width));
  state.SetItemsProcessed(state.iterations() * plan.n_experiments * plan.nets_per_experiment);
}

void BM_EnsembleParallel(benchmark::State& state) {
  const auto act = static_cast<Activation>(state.range(0));
  const int width = static_cast<int>(state.range(1));
  const auto plan = plan_for(builtin_grid(grid_for(act)), width);
  const auto spec = spec_for(act, width);
  EnsembleOptions opt;
  opt.threads = static_cast<int>(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(plan, spec, width, opt));
  state.SetItemsProcessed(state.iterations() * plan.n_experiments * plan.nets_per_experiment);
}

void BM_VertexTensor(benchmark::State& state) {
  const KernelModel k({Activation::Gauss, 1, 1, 1000, 1.0, 1.0});
  const auto grid = builtin_grid(GridName::GaussDefault);
  const auto q = default_quadrature(k, grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        vertex_tensor(k, grid, 4, VertexWeight::One, kInfiniteCutoff, q));
  }
}

void ensemble_args(benchmark::internal::Benchmark* b, bool threads) {
  for (int act = 0; act < 3; ++act) {
    for (int width : {20, 1000}) {
      if (threads) {
        for (int t : {1, 2, 4, 8}) b->Args({act, width, t});
      } else {
        b->Args({act, width});
      }
    }
  }
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_EnsembleSerial)->Apply([](auto* b) { ensemble_args(b, false); });
BENCHMARK(BM_EnsembleParallel)->Apply([](auto* b) { ensemble_args(b, true); });
BENCHMARK(BM_VertexTensor)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
