#include "bspaa/mc_oracle.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "bspaa/decision.hpp"
#include "bspaa/rng.hpp"

namespace bspaa {

DecisionRule make_rule(RuleKind kind, const PriorSpec& prior, const CostModel& cost) {
  switch (kind) {
    case RuleKind::kAlwaysAccept:
      return [](const SufficientStats&) { return Decision::kAccept; };
    case RuleKind::kAlwaysReject:
      return [](const SufficientStats&) { return Decision::kReject; };
    default:
      return [prior, cost](const SufficientStats& s) { return bayes_decision(s, prior, cost); };
  }
}

namespace {

constexpr long long kChunk = 4096;
constexpr int kQuantities = 4;  // loss, D, tau, accelerated

struct Moments {
  std::array<double, kQuantities> sum{};
  std::array<double, kQuantities> sum_sq{};
};

McEstimate finish(double sum, double sum_sq, long long reps, std::uint64_t seed) {
  McEstimate e;
  e.replicates = reps;
  e.seed = seed;
  e.mean = sum / static_cast<double>(reps);
  const double var = std::max(0.0, (sum_sq - sum * e.mean) / static_cast<double>(reps - 1));
  e.std_error = std::sqrt(var / static_cast<double>(reps));
  return e;
}

}  // namespace

McReport mc_evaluate(const SamplingPlan& plan, const DecisionRule& rule, const PriorSpec& prior,
                     const CostModel& cost, long long replicates, std::uint64_t seed, int threads) {
  plan.validate();
  prior.validate();
  cost.validate();
  if (replicates < kMinReplicates) throw std::invalid_argument("Monte-Carlo oracle needs at least 10^4 replicates");
  const int n = plan.sample_size;
  const Decision empty_decision = n == 0 ? rule(SufficientStats{}) : Decision::kReject;

  const long long chunks = (replicates + kChunk - 1) / kChunk;
  std::vector<Moments> partial(static_cast<std::size_t>(chunks));
  std::atomic<long long> next{0};

  const auto worker = [&]() {
    while (true) {
      const long long c = next.fetch_add(1);
      if (c >= chunks) break;
      Moments& mo = partial[static_cast<std::size_t>(c)];
      const long long end = std::min(replicates, (c + 1) * kChunk);
      for (long long i = c * kChunk; i < end; ++i) {
        Engine rng = make_engine(seed, static_cast<std::uint64_t>(i));
        const ModelParams theta = prior_sample_with(prior, rng);
        std::array<double, kQuantities> q{};
        if (n == 0) {
          q[0] = empty_decision == Decision::kAccept ? loss_h(theta.hazard, cost) : cost.reject_cost;
        } else {
          const TestOutcome out = simulate_test_with(plan, theta, rng);
          const int d = out.failures1 + out.failures2;
          const double tau = d == n ? out.failure_times.back() : plan.censor_time;
          const double accelerated = out.stress_raised ? n - out.failures1 : 0.0;
          const Decision a = rule(sufficient_stats(out, plan));
          q[0] = n * cost.item_cost - (n - d) * cost.salvage + cost.accel_cost * accelerated + cost.time_cost * tau +
                 (a == Decision::kAccept ? loss_h(theta.hazard, cost) : cost.reject_cost);
          q[1] = d;
          q[2] = tau;
          q[3] = accelerated;
        }
        for (int k = 0; k < kQuantities; ++k) {
          mo.sum[k] += q[k];
          mo.sum_sq[k] += q[k] * q[k];
        }
      }
    }
  };

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(chunks)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  Moments total;
  for (const Moments& mo : partial) {
    for (int k = 0; k < kQuantities; ++k) {
      total.sum[k] += mo.sum[k];
      total.sum_sq[k] += mo.sum_sq[k];
    }
  }
  McReport r;
  r.risk = finish(total.sum[0], total.sum_sq[0], replicates, seed);
  r.components.failures = finish(total.sum[1], total.sum_sq[1], replicates, seed);
  r.components.duration = finish(total.sum[2], total.sum_sq[2], replicates, seed);
  r.components.accelerated = finish(total.sum[3], total.sum_sq[3], replicates, seed);
  return r;
}

McEstimate mc_bayes_risk(const SamplingPlan& plan, const DecisionRule& rule, const PriorSpec& prior,
                         const CostModel& cost, long long replicates, std::uint64_t seed, int threads) {
  return mc_evaluate(plan, rule, prior, cost, replicates, seed, threads).risk;
}

McComponents mc_components(const SamplingPlan& plan, const PriorSpec& prior, long long replicates,
                           std::uint64_t seed, int threads) {
  const CostModel free_test{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  const DecisionRule accept = [](const SufficientStats&) { return Decision::kAccept; };
  return mc_evaluate(plan, accept, prior, free_test, replicates, seed, threads).components;
}

}  // namespace bspaa
