#pragma once

// Posterior expected acceptance loss, the Bayes accept/reject rule, and the
// monotone acceptance thresholds on the two exposure statistics.

#include <utility>

#include "bspaa/model.hpp"
#include "bspaa/numerics.hpp"
#include "bspaa/priors_loss.hpp"

namespace bspaa {

/// phi(w1, w2) for a fixed (d1, d2, delta) cell.
class PosteriorLoss {
 public:
  PosteriorLoss(int failures1, int failures2, bool stress_raised, const PriorSpec& prior,
                const CostModel& cost, numerics::H1Method method = numerics::H1Method::kAuto);

  struct Eval {
    double value;   // phi
    double dw1;     // d phi / d w1 (always < 0)
    double log_h0;  // log H1(w1, w2, p = 0)
  };

  double operator()(double w1, double w2) const;
  Eval evaluate(double w1, double w2) const;
  /// (phi, log H1(p = 0)) without the derivative.
  std::pair<double, double> value_log_h0(double w1, double w2) const;

  int failures1() const { return d1_; }
  int failures2() const { return d2_; }
  bool stress_raised() const { return raised_; }

 private:
  int d1_, d2_;
  bool raised_;
  CostModel cost_;
  numerics::H1Evaluator h1_;
};

double posterior_expected_loss(const SufficientStats& stats, const PriorSpec& prior, const CostModel& cost);

/// Accept iff the posterior expected loss does not exceed the rejection cost.
Decision bayes_decision(const SufficientStats& stats, const PriorSpec& prior, const CostModel& cost);

/// Acceptance thresholds for one (d1, d2) cell of a plan. The lot is rejected
/// iff w2 < c1 and w1 < c2(w2). A threshold clipped at its support maximum is
/// flagged as saturated; the comparison at the maximum itself is then
/// inclusive, so boundary point masses are classified like direct comparison.
class DecisionThresholds {
 public:
  DecisionThresholds(int failures1, int failures2, const SamplingPlan& plan, const PriorSpec& prior,
                     const CostModel& cost, numerics::H1Method method = numerics::H1Method::kAuto);

  double c1() const { return c1_; }
  bool c1_saturated() const { return c1_saturated_; }
  bool empty() const { return c1_ == 0.0 && !c1_saturated_; }

  struct Threshold {
    double value;
    bool saturated;
  };
  /// w1 solving phi(w1, w2) = Cr on [0, w1 max]; 0 when phi(0, w2) <= Cr.
  Threshold c2(double w2) const;
  /// Same, searching only [lo, w1 max] (the caller knows phi(lo, w2) > Cr).
  Threshold c2(double w2, double lo, double guess) const;
  /// w2 solving phi(w1, w2) = Cr on [lo, w2 max]; `lo` when phi(w1, lo) <= Cr.
  Threshold w2_crossing(double w1, double lo = 0.0) const;

  bool rejects(double w1, double w2) const;

  double w1_max() const { return w1_max_; }
  double w2_max() const { return w2_max_; }
  double reject_cost() const { return reject_cost_; }
  const PosteriorLoss& loss() const { return loss_; }

 private:
  PosteriorLoss loss_;
  double reject_cost_;
  double w1_max_, w2_max_;
  double c1_ = 0.0;
  bool c1_saturated_ = false;
};

DecisionThresholds compute_thresholds(int failures1, int failures2, const SamplingPlan& plan,
                                      const PriorSpec& prior, const CostModel& cost);

}  // namespace bspaa
