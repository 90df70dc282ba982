#include <benchmark/benchmark.h>

#include "draftlab/draftworld.hpp"
#include "draftlab/gradients.hpp"
#include "draftlab/imitation.hpp"
#include "draftlab/train.hpp"

using namespace draftlab;
using namespace draftlab::lab;

namespace {

DraftWorldConfig bench_world() {
  DraftWorldConfig config;
  config.n_locations = 9;
  config.n_clusters = 3;
  config.answer_location = 7;
  return config;
}

policy::TabularPolicy cloned_policy(const DraftWorldConfig& config) {
  const std::vector<Trajectory> experts = {expert_demonstration(config, 7),
                                           expert_demonstration(config, 2)};
  ImitationOptions options;
  options.epochs = 100;
  return dtft_imitation(experts, config.make_policy(), options).policy;
}

}  // namespace

static void BM_RolloutGroup(benchmark::State& state) {
  const auto config = bench_world();
  const auto pol = cloned_policy(config);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rollout_group(config, pol, static_cast<int>(state.range(0)), ++seed));
  }
}
BENCHMARK(BM_RolloutGroup)->Arg(8)->Arg(32);

static void BM_TrainStep(benchmark::State& state) {
  const auto config = bench_world();
  const auto pol = cloned_policy(config);
  TrainOptions options;
  options.steps = 1;
  options.group_size = 8;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    options.seed = ++seed;
    benchmark::DoNotOptimize(train(Algorithm::Dfpo, config, pol, options));
  }
}
BENCHMARK(BM_TrainStep);

static void BM_DecompositionResidual(benchmark::State& state) {
  const auto config = bench_world();
  const auto pol = cloned_policy(config);
  const auto batch = rollout_group(config, pol, 8, 5);
  const auto adv = advantage::compute_advantages(batch.rewards, advantage::MaskMode::Masked);
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_decomposition(pol, batch.trajectories, batch.rewards, adv));
  }
}
BENCHMARK(BM_DecompositionResidual);
