#include <gtest/gtest.h>

#include <cmath>

#include "bspaa/errors.hpp"
#include "bspaa/risk.hpp"
#include "oracles.hpp"

using namespace bspaa;

namespace {
const PriorSpec kPrior{3.0, 1.0, 10.0};
const CostModel kCost{0.5, 0.2, 0.1, 5.0, 30.0, 2.0, 3.0, 2.0};

const std::vector<SamplingPlan>& panel() {
  static const std::vector<SamplingPlan> p = {{3, 0.169, 0.238, 2}, {4, 0.193, 0.193, 0}, {3, 0.162, 0.238, 3},
                                              {5, 0.1, 0.35, 2},    {2, 0.0, 0.3, 2},     {6, 0.05, 0.4, 6},
                                              {4, 0.2, 0.5, 0},     {1, 0.1, 0.2, 1}};
  return p;
}

// Integrates joint_density over the support of one (d1, d2) cell.
double cell_mass(const SamplingPlan& plan, int d1, int d2, const ModelParams& theta) {
  const auto sup = exposure_support(plan, d1, d2);
  const bool raised = plan.raises_stress(d1);
  const auto at = [&](double w1, double w2) {
    return joint_density(SufficientStats{w1, w2, d1, d2, raised}, theta, plan);
  };
  const auto over_w2 = [&](double w1) {
    if (d2 == 0) return at(w1, sup.exposure2_max);
    return oracle::gk([&](double w2) { return at(w1, w2); }, sup.exposure2_min, sup.exposure2_max);
  };
  if (d1 == 0) return over_w2(sup.exposure1_max);
  return oracle::gk(over_w2, sup.exposure1_min, sup.exposure1_max);
}
}  // namespace

TEST(Components, FailuresMatchConditionalOracle) {
  for (const SamplingPlan& p : panel()) {
    const double ref = oracle::expected_failures(p, kPrior);
    EXPECT_NEAR(expected_failures(p, kPrior), ref, 1e-8 * std::max(1.0, ref)) << p.sample_size;
  }
}

TEST(Components, AcceleratedMatchesConditionalOracle) {
  for (const SamplingPlan& p : panel()) {
    const double ref = oracle::expected_accelerated(p, kPrior);
    EXPECT_NEAR(expected_accelerated_items(p, kPrior), ref, 1e-8 * std::max(1.0, ref));
  }
}

TEST(Components, DurationMatchesConditionalOracle) {
  for (const SamplingPlan& p : panel()) {
    const double ref = oracle::expected_duration(p, kPrior);
    EXPECT_NEAR(expected_duration(p, kPrior), ref, 1e-7 * std::max(1.0, ref)) << p.sample_size << ' ' << p.accel_threshold;
  }
}

TEST(Components, SingleTimeFailuresClosedForm) {
  // m = 0 reduces to E[n(1 - (1 + tau/beta)^-alpha)].
  const SamplingPlan p{4, 0.193, 0.193, 0};
  EXPECT_NEAR(expected_failures(p, kPrior), 4 * (1 - std::pow(1 + 0.193, -3.0)), 1e-12);
}

TEST(JointDensity, CellMassesAreBinomial) {
  const SamplingPlan plan{3, 0.2, 0.4, 2};
  for (const ModelParams theta : {ModelParams{1.0, 2.0}, ModelParams{0.5, 5.0}}) {
    const double p1 = -std::expm1(-theta.hazard * 0.2);
    double total = 0.0;
    for (int d1 = 0; d1 <= 3; ++d1) {
      const double rate = plan.raises_stress(d1) ? theta.hazard * theta.accel_factor : theta.hazard;
      const double p2 = -std::expm1(-rate * 0.2);
      for (int d2 = 0; d1 + d2 <= 3; ++d2) {
        const double mass = cell_mass(plan, d1, d2, theta);
        EXPECT_NEAR(mass, oracle::binom_pmf(3, d1, p1) * oracle::binom_pmf(3 - d1, d2, p2), 1e-9) << d1 << d2;
        total += mass;
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-8);
  }
}

TEST(JointDensity, TermsReproduceDensity) {
  const SamplingPlan plan{4, 0.15, 0.4, 3};
  const ModelParams theta{1.3, 2.5};
  const int d1 = 2, d2 = 2;
  const auto terms = joint_density_terms(d1, d2, plan);
  const auto sup = exposure_support(plan, d1, d2);
  for (double f1 : {0.1, 0.45, 0.8})
    for (double f2 : {0.2, 0.5, 0.9}) {
      const double w1 = sup.exposure1_min + f1 * (sup.exposure1_max - sup.exposure1_min);
      const double w2 = sup.exposure2_min + f2 * (sup.exposure2_max - sup.exposure2_min);
      double s = 0.0;
      for (const auto& t : terms) {
        if (w1 <= t.shift1 || w2 <= t.shift2) continue;
        s += t.coefficient * std::pow(w1 - t.shift1, d1 - 1) / std::tgamma(d1) * std::pow(w2 - t.shift2, d2 - 1) /
             std::tgamma(d2);
      }
      const double phi = theta.accel_factor;
      s *= std::pow(theta.hazard, d1 + d2) * std::pow(phi, d2) * std::exp(-theta.hazard * (w1 + phi * w2));
      EXPECT_NEAR(joint_density({w1, w2, d1, d2, true}, theta, plan), s, 1e-9 * std::abs(s) + 1e-12);
    }
}

TEST(JointDensity, ZeroOutsideSupportOrWrongStress) {
  const SamplingPlan plan{3, 0.2, 0.4, 2};
  EXPECT_EQ(joint_density({0.1, 0.3, 1, 1, true}, {1, 2}, plan), 0.0);
  EXPECT_EQ(joint_density({0.5, 0.3, 1, 1, false}, {1, 2}, plan), 0.0);
}

TEST(BayesRisk, ReferenceAdaptivePlan) {
  const auto e = bayes_risk({3, 0.169, 0.238, 2}, kPrior, kCost);
  EXPECT_NEAR(e.bayes_risk, 27.704, 0.005 * 27.704);
  EXPECT_NEAR(e.expected_failures, 2.013, 0.05);
  EXPECT_NEAR(e.expected_duration, 0.220, 0.01);
  const double assembled = 3 * 0.3 + 0.1 * e.expected_accelerated + 0.2 * e.expected_failures +
                           5 * e.expected_duration + e.r1_term;
  EXPECT_NEAR(e.bayes_risk, assembled, 1e-12);
}

TEST(BayesRisk, R1BoundedByActionsAndPerfectInformation) {
  for (const SamplingPlan& p : panel()) {
    const auto e = bayes_risk(p, kPrior, kCost);
    EXPECT_LE(e.r1_term, 30.0 + 1e-9);
    EXPECT_GE(e.r1_term, perfect_information_risk(kPrior, kCost) - 1e-9);
  }
}

TEST(BayesRisk, NoSampling) {
  EXPECT_EQ(bayes_risk(SamplingPlan::no_sampling(), kPrior, kCost).bayes_risk, 30.0);
  CostModel c = kCost;
  c.reject_cost = 60;
  EXPECT_EQ(bayes_risk(SamplingPlan::no_sampling(), kPrior, c).bayes_risk, 35.0);
}

TEST(BayesRisk, AllThresholdsBitIdentical) {
  const auto all = bayes_risk_all_thresholds(5, 0.12, 0.3, kPrior, kCost);
  ASSERT_EQ(all.size(), 6u);
  for (int m = 0; m <= 5; ++m) {
    const auto e = bayes_risk({5, 0.12, 0.3, m}, kPrior, kCost);
    EXPECT_EQ(all[m].bayes_risk, e.bayes_risk) << m;
    EXPECT_EQ(all[m].expected_duration, e.expected_duration);
  }
}

TEST(BayesRisk, QuadratureOrderConverged) {
  RiskOptions fine;
  fine.region_order = 48;
  fine.phi_order = 96;
  for (const SamplingPlan& p : panel()) {
    EXPECT_NEAR(bayes_risk(p, kPrior, kCost).bayes_risk, bayes_risk(p, kPrior, kCost, fine).bayes_risk, 1e-6);
  }
}

TEST(BayesRisk, H1MethodsAgree) {
  RiskOptions quad;
  quad.h1_method = numerics::H1Method::kQuadrature;
  const SamplingPlan p{3, 0.169, 0.238, 2};
  EXPECT_NEAR(bayes_risk(p, kPrior, kCost).bayes_risk, bayes_risk(p, kPrior, kCost, quad).bayes_risk, 1e-7);
}

TEST(BayesRisk, UnitCoefficientVariant) {
  RiskOptions unit;
  unit.ed_coefficient = EdCoefficient::kUnit;
  const SamplingPlan p{3, 0.169, 0.238, 2};
  const auto a = bayes_risk(p, kPrior, kCost);
  const auto b = bayes_risk(p, kPrior, kCost, unit);
  EXPECT_NEAR(b.bayes_risk - a.bayes_risk, 0.8 * a.expected_failures, 1e-10);
}

TEST(BayesRisk, SampleSizeCap) {
  EXPECT_THROW(bayes_risk({kMaxSampleSize + 1, 0.1, 0.2, 1}, kPrior, kCost), CapabilityError);
}
