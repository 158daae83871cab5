// Fluid-loss gradient: tape reference vs batched serial kernel vs sharded
// OpenMP kernel, on a 12-layer network at default widths.

#include <benchmark/benchmark.h>

#include "vpinn/loss.hpp"
#include "vpinn/trainer.hpp"

namespace {

using namespace vpinn;

struct Fixture {
  Problem problem;
  LossWeights weights;
  FsiNetworks nets = FsiNetworks::build(NetworkArchitecture{}, 1);
  CollocationSet samples;

  explicit Fixture(int n) {
    weights.ns = 1e-3;
    samples = draw_collocation(problem.geometry, SampleCounts{n, n, n, 8}, 2);
  }
};

void BM_TapeReference(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    ad::Tape tape;
    const BoundNetworks b = bind_networks(tape, f.nets);
    const TapeLoss L = assemble_fluid_loss(tape, network_fields(f.nets, b), f.problem, f.samples, f.weights);
    benchmark::DoNotOptimize(ad::param_grad(L.total, b.u));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SerialKernel(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  const LossEngine engine(f.problem, f.weights);
  for (auto _ : state) benchmark::DoNotOptimize(engine.fluid(f.nets, f.samples, {true, false, false}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ShardedKernel(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  const int workers = static_cast<int>(state.range(1));
  const LossEngine engine(f.problem, f.weights);
  const auto shards = f.samples.shard(workers);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        parallel_loss_gradient(engine, BlockKind::Fluid, f.nets, shards, {true, false, false}, workers));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_TapeReference)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SerialKernel)->Arg(64)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShardedKernel)->Args({1000, 1})->Args({1000, 2})->Args({1000, 4})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
