#include <gtest/gtest.h>

#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <stdexcept>

#include "bspaa/priors_loss.hpp"
#include "bspaa/rng.hpp"
#include "oracles.hpp"

using namespace bspaa;

namespace {
const PriorSpec kPrior{3.0, 1.0, 10.0};
const CostModel kCost{0.5, 0.2, 0.1, 5.0, 30.0, 2.0, 3.0, 2.0};
}  // namespace

TEST(Prior, Validate) {
  EXPECT_NO_THROW(kPrior.validate());
  EXPECT_THROW((PriorSpec{0.0, 1.0, 10.0}.validate()), std::invalid_argument);
  EXPECT_THROW((PriorSpec{3.0, -1.0, 10.0}.validate()), std::invalid_argument);
  EXPECT_THROW((PriorSpec{3.0, 1.0, 1.0}.validate()), std::invalid_argument);
}

TEST(Cost, Validate) {
  EXPECT_NO_THROW(kCost.validate());
  CostModel c = kCost;
  c.salvage = 0.6;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = kCost;
  c.time_cost = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Loss, QuadraticAndPriorMean) {
  EXPECT_DOUBLE_EQ(loss_h(0.0, kCost), 2.0);
  EXPECT_DOUBLE_EQ(loss_h(2.0, kCost), 2.0 + 6.0 + 8.0);
  EXPECT_THROW(loss_h(-1.0, kCost), std::invalid_argument);
  EXPECT_DOUBLE_EQ(prior_expected_loss(kPrior, kCost), 35.0);
  const double mc = oracle::prior_expectation(kPrior, [](double x, double) { return loss_h(x, kCost); }, false);
  EXPECT_NEAR(mc, 35.0, 1e-9);
}

TEST(NoSampling, PicksCheaperAction) {
  CostModel c = kCost;
  auto r = no_sampling_risk(kPrior, c);
  EXPECT_EQ(r.decision, Decision::kReject);
  EXPECT_EQ(r.risk, 30.0);
  c.reject_cost = 60;
  r = no_sampling_risk(kPrior, c);
  EXPECT_EQ(r.decision, Decision::kAccept);
  EXPECT_EQ(r.risk, 35.0);
  c.reject_cost = 35;
  EXPECT_EQ(no_sampling_risk(kPrior, c).decision, Decision::kAccept);
}

TEST(PerfectInformation, MatchesQuadrature) {
  for (double cr : {1.0, 10.0, 30.0, 100.0}) {
    CostModel c = kCost;
    c.reject_cost = cr;
    const double ref = oracle::prior_expectation(
        kPrior, [&](double x, double) { return std::min(loss_h(x, c), cr); }, false);
    EXPECT_NEAR(perfect_information_risk(kPrior, c), ref, 1e-8 * ref) << cr;
    EXPECT_LE(perfect_information_risk(kPrior, c), no_sampling_risk(kPrior, c).risk);
  }
}

TEST(PriorSample, MomentsAndSupport) {
  Engine rng = make_engine(5);
  const int n = 200000;
  double s = 0, sphi = 0;
  for (int i = 0; i < n; ++i) {
    const ModelParams p = prior_sample_with(kPrior, rng);
    ASSERT_GT(p.hazard, 0.0);
    ASSERT_GT(p.accel_factor, 1.0);
    ASSERT_LT(p.accel_factor, 10.0);
    s += p.hazard;
    sphi += p.accel_factor;
  }
  EXPECT_NEAR(s / n, 3.0, 4 * std::sqrt(3.0 / n));
  EXPECT_NEAR(sphi / n, 5.5, 4 * 9.0 / std::sqrt(12.0 * n));
  EXPECT_EQ(prior_sample(kPrior, 11).hazard, prior_sample(kPrior, 11).hazard);
}
