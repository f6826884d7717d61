#include <benchmark/benchmark.h>

#include "bspaa/decision.hpp"
#include "bspaa/mc_oracle.hpp"
#include "bspaa/risk.hpp"

using namespace bspaa;

namespace {
const PriorSpec kPrior{3.0, 1.0, 10.0};
const CostModel kCost{0.5, 0.2, 0.1, 5.0, 30.0, 2.0, 3.0, 2.0};
}  // namespace

static void BM_PosteriorLoss(benchmark::State& state) {
  const PosteriorLoss phi(1, 2, state.range(0) != 0, kPrior, kCost);
  double w = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(phi(w, 0.1));
    w = w < 1.0 ? w * 1.001 : 0.3;
  }
}
BENCHMARK(BM_PosteriorLoss)->Arg(0)->Arg(1);

static void BM_PlanRisk(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SamplingPlan plan{n, 0.15, 0.25, n / 2};
  for (auto _ : state) benchmark::DoNotOptimize(bayes_risk(plan, kPrior, kCost).bayes_risk);
}
BENCHMARK(BM_PlanRisk)->Arg(3)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_AllThresholds(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bayes_risk_all_thresholds(n, 0.15, 0.25, kPrior, kCost));
}
BENCHMARK(BM_AllThresholds)->Arg(3)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_MonteCarlo(benchmark::State& state) {
  const SamplingPlan plan{3, 0.169, 0.238, 2};
  const DecisionRule rule = make_rule(RuleKind::kBayes, kPrior, kCost);
  for (auto _ : state) benchmark::DoNotOptimize(mc_bayes_risk(plan, rule, kPrior, kCost, 10000, 1).mean);
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
