#pragma once

// Monte-Carlo estimate of the Bayes risk of a plan, built only on the lifetime
// model, the priors and the raw per-test loss.

#include <cstdint>
#include <functional>

#include "bspaa/model.hpp"
#include "bspaa/priors_loss.hpp"

namespace bspaa {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(replicates)
  long long replicates = 0;
  std::uint64_t seed = 0;
};

using DecisionRule = std::function<Decision(const SufficientStats&)>;

enum class RuleKind { kBayes, kAlwaysAccept, kAlwaysReject };

DecisionRule make_rule(RuleKind kind, const PriorSpec& prior, const CostModel& cost);

inline constexpr long long kMinReplicates = 10000;

/// Per replicate: draw (lambda, phi) from the prior, run the test, apply the
/// rule, and charge
///   n*Cs - (n-d)*vs + Ca*delta*(n-d1) + Ct*tau + (accept ? h(lambda) : Cr).
/// Replicate i always uses random stream i of `seed`, so different rules see
/// common random numbers and results do not depend on `threads`.
McEstimate mc_bayes_risk(const SamplingPlan& plan, const DecisionRule& rule, const PriorSpec& prior,
                         const CostModel& cost, long long replicates, std::uint64_t seed, int threads = 1);

struct McComponents {
  McEstimate failures;     // D
  McEstimate duration;     // tau
  McEstimate accelerated;  // delta * (n - d1)
};

McComponents mc_components(const SamplingPlan& plan, const PriorSpec& prior, long long replicates,
                           std::uint64_t seed, int threads = 1);

/// Risk and components from one pass over the same replicates.
struct McReport {
  McEstimate risk;
  McComponents components;
};
McReport mc_evaluate(const SamplingPlan& plan, const DecisionRule& rule, const PriorSpec& prior,
                     const CostModel& cost, long long replicates, std::uint64_t seed, int threads = 1);

}  // namespace bspaa
