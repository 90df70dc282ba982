#include <benchmark/benchmark.h>

#include "draftlab/advantage.hpp"
#include "draftlab/config.hpp"
#include "draftlab/rng.hpp"
#include "draftlab/verify.hpp"

using namespace draftlab;

static void BM_AdvantagePipeline(benchmark::State& state) {
  Rng rng(1);
  const auto group = verify::random_mixed_group(rng, static_cast<int>(state.range(0)),
                                                static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const auto adv = advantage::compute_advantages(group, advantage::MaskMode::Masked);
    benchmark::DoNotOptimize(advantage::dfpo_objective(group, adv));
    benchmark::DoNotOptimize(advantage::bias_terms(group, adv));
  }
}
BENCHMARK(BM_AdvantagePipeline)->Arg(8)->Arg(16)->Arg(64);

static void BM_RelativeAdvantageCheck(benchmark::State& state) {
  Rng rng(2);
  const auto group = verify::random_mixed_group(rng, 16, 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(advantage::check_relative_advantage(group));
  }
}
BENCHMARK(BM_RelativeAdvantageCheck);

static void BM_InequalitySweep(benchmark::State& state) {
  config::VerifyConfig cfg;
  cfg.relative_advantage_trials = static_cast<int>(state.range(0));
  cfg.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify::check_relative_advantage_suite(cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InequalitySweep)->Arg(10000)->Unit(benchmark::kMillisecond);
