#pragma once

// Bayes risk of a plan under the Bayes decision rule and its components.

#include <vector>

#include "bspaa/decision.hpp"
#include "bspaa/model.hpp"
#include "bspaa/numerics.hpp"
#include "bspaa/priors_loss.hpp"

namespace bspaa {

/// Coefficient on E[D] in the risk. The per-unit loss n*Cs - (n-d)*vs expands
/// to n(Cs-vs) + vs*d; kUnit reproduces the alternative display with
/// coefficient 1.
enum class EdCoefficient { kSalvage, kUnit };

struct RiskOptions {
  EdCoefficient ed_coefficient = EdCoefficient::kSalvage;
  numerics::H1Method h1_method = numerics::H1Method::kAuto;
  int region_order = 16;  // Gauss-Legendre nodes per smooth piece of a rejection region
  int phi_order = 32;     // nodes over the acceleration factor in E[tau]
};

struct PlanEvaluation {
  double bayes_risk = 0.0;
  double expected_failures = 0.0;     // E[D]
  double expected_duration = 0.0;     // E[tau]
  double expected_accelerated = 0.0;  // n_as
  double r1_term = 0.0;               // E[min(phi(X), Cr)]
};

/// Largest sample size for which the alternating binomial sums are trusted.
inline constexpr int kMaxSampleSize = 30;

double expected_failures(const SamplingPlan& plan, const PriorSpec& prior);
double expected_accelerated_items(const SamplingPlan& plan, const PriorSpec& prior);
double expected_duration(const SamplingPlan& plan, const PriorSpec& prior, const RiskOptions& options = {});

/// One term of the expansion of the conditional density of (W1, W2) given
/// (D1, D2) = (d1, d2) and the parameters:
///   coefficient * (w1 - shift1)_+^{d1-1}/(d1-1)! * (w2 - shift2)_+^{d2-1}/(d2-1)!
///     * lambda^d phi^{delta d2} exp(-lambda (w1 + phi^delta w2)).
/// A zero count makes its coordinate degenerate at the shift.
struct JointDensityTerm {
  double coefficient;
  double shift1;
  double shift2;
};
std::vector<JointDensityTerm> joint_density_terms(int failures1, int failures2, const SamplingPlan& plan);

/// Density of (W1, W2, D1, D2) at `stats` given the parameters. Degenerate
/// coordinates (d1 = 0 or d2 = 0) contribute a point mass rather than a
/// density. Zero outside the support.
double joint_density(const SufficientStats& stats, const ModelParams& params, const SamplingPlan& plan);

/// H(d1, d2): integral of (Cr - phi) against the prior predictive density over
/// the rejection region of the cell. Non-positive.
double rejection_region_term(int failures1, int failures2, const SamplingPlan& plan, const PriorSpec& prior,
                             const CostModel& cost, const DecisionThresholds& thresholds,
                             const RiskOptions& options = {});

PlanEvaluation bayes_risk(const SamplingPlan& plan, const PriorSpec& prior, const CostModel& cost,
                          const RiskOptions& options = {});

/// Evaluations of (n, t1, t2, m) for every m = 0..n, sharing the per-row work.
/// Entry m is bit-identical to bayes_risk of the same plan.
std::vector<PlanEvaluation> bayes_risk_all_thresholds(int sample_size, double switch_time, double censor_time,
                                                      const PriorSpec& prior, const CostModel& cost,
                                                      const RiskOptions& options = {});

}  // namespace bspaa
