#include <benchmark/benchmark.h>

#include "draftlab/evaluators.hpp"
#include "draftlab/judge.hpp"
#include "draftlab/router.hpp"

using namespace draftlab;

static void BM_StringExactMatch(benchmark::State& state) {
  router::EvalSpec spec;
  spec.kind = router::EvalKind::StringExactMatch;
  router::StubJudgeClient stub;
  const AnswerValue predicted = "  The Proposed   Focus on generalist agents ";
  const AnswerValue golden = "the proposed focus on generalist agents";
  for (auto _ : state) {
    benchmark::DoNotOptimize(router::evaluate(spec, predicted, golden, stub));
  }
}
BENCHMARK(BM_StringExactMatch);

static void BM_CombinatorTree(benchmark::State& state) {
  router::EvalSpec leaf;
  leaf.kind = router::EvalKind::StructuredObjectExactMatch;
  router::EvalSpec negation;
  negation.kind = router::EvalKind::Negation;
  negation.children = {leaf};
  router::EvalSpec spec;
  spec.kind = router::EvalKind::Conjunction;
  spec.children = {leaf, negation};
  for (router::EvalSpec& extra : spec.children) (void)extra;

  router::StubJudgeClient stub;
  const AnswerValue predicted = {{"k", {1, 2, 3}}, {"name", "x"}};
  const AnswerValue golden = {{"k", {1, 2, 4}}, {"name", "x"}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(router::evaluate(spec, predicted, golden, stub));
  }
}
BENCHMARK(BM_CombinatorTree);

static void BM_TokenF1(benchmark::State& state) {
  const std::string golden =
      "The proposed focus on taking a significant step forward in learning high-performance "
      "generalist agents.";
  const std::string predicted =
      "This paper concentrates on taking a important step forward in learning outperformed "
      "generalist agents.";
  for (auto _ : state) {
    benchmark::DoNotOptimize(router::token_f1(predicted, golden));
  }
}
BENCHMARK(BM_TokenF1);

static void BM_Route(benchmark::State& state) {
  const auto table = router::RouteTable::builtin();
  for (auto _ : state) {
    benchmark::DoNotOptimize(table.route("text", "python list of strings"));
  }
}
BENCHMARK(BM_Route);
