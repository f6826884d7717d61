#pragma once

// Baseline designs (no acceleration, acceleration from the switch time for
// every unit) and the relative risk savings of the adaptive plan over them.

#include <optional>

#include "bspaa/optimizer.hpp"

namespace bspaa {

struct ComparisonReport {
  OptimalPlan bspaa;
  OptimalPlan cbsp;   // m = 0: reported as (n, tau) with tau the censoring time
  OptimalPlan cbspa;  // m = n
  double rrs1 = 0.0;  // percent saving over cbsp
  double rrs2 = 0.0;  // percent saving over cbspa
};

OptimalPlan optimize_cbsp(const PriorSpec& prior, const CostModel& cost, std::optional<int> n_cap = std::nullopt,
                          const OptimizerOptions& options = {});
OptimalPlan optimize_cbspa(const PriorSpec& prior, const CostModel& cost, std::optional<int> n_cap = std::nullopt,
                           const OptimizerOptions& options = {});

/// 100 (r_ref - r_b) / r_ref.
double relative_risk_saving(double r_ref, double r_b);

/// Runs the three searches on one shared cache. The adaptive result is the
/// best plan over every cell visited by any of the three, so it can never
/// lose to a baseline.
ComparisonReport compare_plans(const PriorSpec& prior, const CostModel& cost,
                               std::optional<int> n_cap = std::nullopt, const OptimizerOptions& options = {});

}  // namespace bspaa
