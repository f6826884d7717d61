#include "bspaa/decision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "bspaa/errors.hpp"

namespace bspaa {

PosteriorLoss::PosteriorLoss(int failures1, int failures2, bool stress_raised, const PriorSpec& prior,
                             const CostModel& cost, numerics::H1Method method)
    : d1_(failures1),
      d2_(failures2),
      raised_(stress_raised),
      cost_(cost),
      h1_(failures1, failures2, stress_raised, prior, method) {}

double PosteriorLoss::operator()(double w1, double w2) const {
  std::array<double, 3> lh{};
  h1_.log_values(w1, w2, lh);
  return cost_.loss0 + cost_.loss1 * std::exp(lh[1] - lh[0]) + cost_.loss2 * std::exp(lh[2] - lh[0]);
}

std::pair<double, double> PosteriorLoss::value_log_h0(double w1, double w2) const {
  std::array<double, 3> lh{};
  h1_.log_values(w1, w2, lh);
  return {cost_.loss0 + cost_.loss1 * std::exp(lh[1] - lh[0]) + cost_.loss2 * std::exp(lh[2] - lh[0]), lh[0]};
}

PosteriorLoss::Eval PosteriorLoss::evaluate(double w1, double w2) const {
  std::array<double, 4> lh{};
  h1_.log_values(w1, w2, lh);
  const double r1 = std::exp(lh[1] - lh[0]);
  const double r2 = std::exp(lh[2] - lh[0]);
  const double r3 = std::exp(lh[3] - lh[0]);
  // d H1(p) / d w1 = -H1(p + 1).
  const double dw1 = -(cost_.loss1 * (r2 - r1 * r1) + cost_.loss2 * (r3 - r2 * r1));
  return {cost_.loss0 + cost_.loss1 * r1 + cost_.loss2 * r2, dw1, lh[0]};
}

double posterior_expected_loss(const SufficientStats& stats, const PriorSpec& prior, const CostModel& cost) {
  if (stats.failures1 < 0 || stats.failures2 < 0) throw std::invalid_argument("failure counts must be >= 0");
  if (!(stats.exposure1 >= 0.0) || !(stats.exposure2 >= 0.0)) throw std::invalid_argument("exposures must be >= 0");
  if (!stats.stress_raised && stats.failures() == 0 && stats.exposure1 == 0.0 && stats.exposure2 == 0.0) {
    return prior_expected_loss(prior, cost);
  }
  const PosteriorLoss phi(stats.failures1, stats.failures2, stats.stress_raised, prior, cost);
  return phi(stats.exposure1, stats.exposure2);
}

Decision bayes_decision(const SufficientStats& stats, const PriorSpec& prior, const CostModel& cost) {
  return posterior_expected_loss(stats, prior, cost) <= cost.reject_cost ? Decision::kAccept : Decision::kReject;
}

// ---------------------------------------------------------------------------

namespace {

double root_tol(double scale) { return 1e-13 * std::max(1.0, scale); }

}  // namespace

DecisionThresholds::DecisionThresholds(int failures1, int failures2, const SamplingPlan& plan,
                                       const PriorSpec& prior, const CostModel& cost, numerics::H1Method method)
    : loss_(failures1, failures2, plan.raises_stress(failures1), prior, cost, method),
      reject_cost_(cost.reject_cost) {
  plan.validate();
  const ExposureSupport s = exposure_support(plan, failures1, failures2);
  w1_max_ = s.exposure1_max;
  w2_max_ = s.exposure2_max;
  const Threshold t = w2_crossing(0.0);
  c1_ = t.value;
  c1_saturated_ = t.saturated;
}

DecisionThresholds::Threshold DecisionThresholds::c2(double w2) const { return c2(w2, 0.0, w1_max_ * 0.5); }

DecisionThresholds::Threshold DecisionThresholds::c2(double w2, double lo, double guess) const {
  const auto fdf = [&](double w1) {
    const PosteriorLoss::Eval e = loss_.evaluate(w1, w2);
    return std::pair<double, double>{e.value - reject_cost_, e.dw1};
  };
  const numerics::RootResult r = numerics::newton_bracketed(fdf, lo, w1_max_, root_tol(w1_max_), guess);
  switch (r.status) {
    case numerics::Bracket::kNoCrossingAbove:
      return {w1_max_, true};
    case numerics::Bracket::kNoCrossingBelow:
      return {lo, false};
    default:
      return {r.root, false};
  }
}

DecisionThresholds::Threshold DecisionThresholds::w2_crossing(double w1, double lo) const {
  const auto f = [&](double w2) { return loss_(w1, w2) - reject_cost_; };
  const numerics::RootResult r = numerics::bisect(f, lo, w2_max_, root_tol(w2_max_));
  switch (r.status) {
    case numerics::Bracket::kNoCrossingAbove:
      return {w2_max_, true};
    case numerics::Bracket::kNoCrossingBelow:
      return {lo, false};
    default:
      return {r.root, false};
  }
}

bool DecisionThresholds::rejects(double w1, double w2) const {
  if (!(w2 < c1_ || (c1_saturated_ && w2 <= c1_))) return false;
  const Threshold t = c2(w2);
  return w1 < t.value || (t.saturated && w1 <= t.value);
}

DecisionThresholds compute_thresholds(int failures1, int failures2, const SamplingPlan& plan,
                                      const PriorSpec& prior, const CostModel& cost) {
  if (failures1 < 0 || failures2 < 0 || failures1 + failures2 > plan.sample_size) {
    throw std::invalid_argument("compute_thresholds: need d1 + d2 <= n");
  }
  return DecisionThresholds(failures1, failures2, plan, prior, cost);
}

}  // namespace bspaa
