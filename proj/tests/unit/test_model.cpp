#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bspaa/model.hpp"
#include "oracles.hpp"

using namespace bspaa;

namespace {
const SamplingPlan kVoltagePlan{4, 18.29, 28.29, 2};
}

TEST(Plan, ValidateRejectsBadInvariants) {
  EXPECT_NO_THROW((SamplingPlan{3, 0.1, 0.2, 2}.validate()));
  EXPECT_NO_THROW(SamplingPlan::no_sampling().validate());
  EXPECT_THROW((SamplingPlan{3, 0.3, 0.2, 2}.validate()), std::invalid_argument);
  EXPECT_THROW((SamplingPlan{3, 0.1, 0.2, 4}.validate()), std::invalid_argument);
  EXPECT_THROW((SamplingPlan{-1, 0.1, 0.2, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((SamplingPlan{3, -0.1, 0.2, 0}.validate()), std::invalid_argument);
}

TEST(Params, Validate) {
  EXPECT_THROW((ModelParams{0.0, 2.0}.validate()), std::invalid_argument);
  EXPECT_THROW((ModelParams{1.0, 0.5}.validate()), std::invalid_argument);
}

TEST(Cem, CdfIsIntegralOfPdf) {
  const ModelParams p{0.8, 3.5};
  for (bool raised : {false, true})
    for (double t : {0.1, 0.4, 0.9, 2.0}) {
      const auto pdf = [&](double x) { return cem_pdf(x, p, 0.4, raised); };
      const double integral = t <= 0.4 ? oracle::gk(pdf, 0.0, t) : oracle::gk(pdf, 0.0, 0.4) + oracle::gk(pdf, 0.4, t);
      EXPECT_NEAR(cem_cdf(t, p, 0.4, raised), integral, 1e-10);
    }
}

TEST(Cem, ContinuousAtSwitchAndHazardJumps) {
  const ModelParams p{0.5, 4.0};
  const double t1 = 1.0;
  EXPECT_NEAR(cem_cdf(t1, p, t1, true), -std::expm1(-0.5), 1e-15);
  const double before = cem_pdf(t1 - 1e-9, p, t1, true) / (1 - cem_cdf(t1 - 1e-9, p, t1, true));
  const double after = cem_pdf(t1 + 1e-9, p, t1, true) / (1 - cem_cdf(t1 + 1e-9, p, t1, true));
  EXPECT_NEAR(after / before, 4.0, 1e-6);
}

TEST(Simulate, DeterministicForSeed) {
  const SamplingPlan plan{10, 0.3, 0.8, 4};
  const ModelParams p{1.2, 3.0};
  const auto a = simulate_test(plan, p, 99);
  const auto b = simulate_test(plan, p, 99);
  EXPECT_EQ(a.failure_times, b.failure_times);
  EXPECT_TRUE(std::is_sorted(a.failure_times.begin(), a.failure_times.end()));
  for (double y : a.failure_times) {
    EXPECT_GT(y, 0.0);
    EXPECT_LE(y, plan.censor_time);
  }
}

TEST(Simulate, FailureFractionMatchesCdf) {
  const SamplingPlan plan{20, 0.3, 0.9, 20};
  const ModelParams p{1.0, 2.5};
  long long before = 0, total = 0;
  const int reps = 20000;
  for (int i = 0; i < reps; ++i) {
    const auto o = simulate_test(plan, p, 1000 + i);
    before += o.failures1;
    total += o.failures1 + o.failures2;
    EXPECT_TRUE(o.stress_raised);
  }
  const double items = 20.0 * reps;
  const double p1 = cem_cdf(0.3, p, 0.3, true), p2 = cem_cdf(0.9, p, 0.3, true);
  EXPECT_NEAR(before / items, p1, 4 * std::sqrt(p1 * (1 - p1) / items));
  EXPECT_NEAR(total / items, p2, 4 * std::sqrt(p2 * (1 - p2) / items));
}

TEST(Stats, VoltageDatasets) {
  struct Row {
    std::vector<double> y;
    int d1, d2;
    double w1, w2;
  };
  const std::vector<Row> rows = {
      {{18.76, 19.58, 20.00, 23.56}, 0, 4, 73.16, 8.74},
      {{6.83, 7.97, 24.72}, 2, 1, 51.38, 16.43},
      {{10.20, 19.44, 20.02}, 1, 2, 65.07, 12.88},
      {{15.62, 18.98, 19.74, 21.78}, 1, 3, 70.49, 5.63},
  };
  for (const Row& r : rows) {
    const auto o = make_outcome(kVoltagePlan, r.y);
    const auto s = sufficient_stats(o, kVoltagePlan);
    EXPECT_EQ(s.failures1, r.d1);
    EXPECT_EQ(s.failures2, r.d2);
    EXPECT_EQ(s.stress_raised, r.d1 < 2);
    EXPECT_NEAR(s.exposure1, r.w1, 1e-9);
    EXPECT_NEAR(s.exposure2, r.w2, 1e-9);
  }
}

TEST(Stats, ExposureSupport) {
  const SamplingPlan plan{5, 0.2, 0.5, 3};
  const auto s = exposure_support(plan, 2, 1);
  EXPECT_DOUBLE_EQ(s.exposure1_min, 3 * 0.2);
  EXPECT_DOUBLE_EQ(s.exposure1_max, 5 * 0.2);
  EXPECT_NEAR(s.exposure2_min, 2 * 0.3, 1e-15);
  EXPECT_NEAR(s.exposure2_max, 3 * 0.3, 1e-15);
}

TEST(Likelihood, MaximizedAtMle) {
  const SufficientStats s{2.0, 1.0, 3, 2, true};
  // For fixed phi the hazard MLE is d / (w1 + phi w2).
  const double phi = 3.0, mle = 5.0 / (2.0 + phi * 1.0);
  const double at = log_likelihood({mle, phi}, s);
  EXPECT_GT(at, log_likelihood({mle * 1.05, phi}, s));
  EXPECT_GT(at, log_likelihood({mle * 0.95, phi}, s));
  EXPECT_NEAR(at, 5 * std::log(mle) + 2 * std::log(phi) - 5.0, 1e-12);
}
