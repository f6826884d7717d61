#include <gtest/gtest.h>

#include <stdexcept>

#include "bspaa/mc_oracle.hpp"
#include "bspaa/risk.hpp"

using namespace bspaa;

namespace {
const PriorSpec kPrior{3.0, 1.0, 10.0};
const CostModel kCost{0.5, 0.2, 0.1, 5.0, 30.0, 2.0, 3.0, 2.0};
const SamplingPlan kPlan{3, 0.169, 0.238, 2};
}  // namespace

TEST(Mc, RejectsTinyRuns) {
  EXPECT_THROW(mc_bayes_risk(kPlan, make_rule(RuleKind::kBayes, kPrior, kCost), kPrior, kCost, 100, 1),
               std::invalid_argument);
}

TEST(Mc, NoSamplingPlan) {
  const auto bayes = mc_bayes_risk(SamplingPlan::no_sampling(), make_rule(RuleKind::kBayes, kPrior, kCost), kPrior,
                                   kCost, 20000, 4);
  EXPECT_EQ(bayes.mean, 30.0);
  EXPECT_EQ(bayes.std_error, 0.0);
  const auto accept = mc_bayes_risk(SamplingPlan::no_sampling(), make_rule(RuleKind::kAlwaysAccept, kPrior, kCost),
                                    kPrior, kCost, 200000, 4);
  EXPECT_NEAR(accept.mean, 35.0, 4 * accept.std_error);
}

TEST(Mc, ThreadCountDoesNotChangeResult) {
  const auto rule = make_rule(RuleKind::kBayes, kPrior, kCost);
  const auto a = mc_bayes_risk(kPlan, rule, kPrior, kCost, 30000, 9, 1);
  const auto b = mc_bayes_risk(kPlan, rule, kPrior, kCost, 30000, 9, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Mc, ComponentsMatchClosedForms) {
  const auto c = mc_components(kPlan, kPrior, 200000, 21);
  EXPECT_NEAR(c.failures.mean, expected_failures(kPlan, kPrior), 3.5 * c.failures.std_error);
  EXPECT_NEAR(c.duration.mean, expected_duration(kPlan, kPrior), 3.5 * c.duration.std_error);
  EXPECT_NEAR(c.accelerated.mean, expected_accelerated_items(kPlan, kPrior), 3.5 * c.accelerated.std_error);
}

TEST(Mc, BayesRuleMatchesClosedFormAndBeatsFixedRules) {
  const auto bayes = mc_bayes_risk(kPlan, make_rule(RuleKind::kBayes, kPrior, kCost), kPrior, kCost, 200000, 33);
  const auto accept = mc_bayes_risk(kPlan, make_rule(RuleKind::kAlwaysAccept, kPrior, kCost), kPrior, kCost, 200000, 33);
  const auto reject = mc_bayes_risk(kPlan, make_rule(RuleKind::kAlwaysReject, kPrior, kCost), kPrior, kCost, 200000, 33);
  EXPECT_NEAR(bayes.mean, bayes_risk(kPlan, kPrior, kCost).bayes_risk, 3.5 * bayes.std_error);
  EXPECT_LT(bayes.mean, accept.mean);
  EXPECT_LT(bayes.mean, reject.mean);
}
