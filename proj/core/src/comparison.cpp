#include "bspaa/comparison.hpp"

#include <stdexcept>

namespace bspaa {

OptimalPlan optimize_cbsp(const PriorSpec& prior, const CostModel& cost, std::optional<int> n_cap,
                          const OptimizerOptions& options) {
  SearchCache cache(prior, cost, options);
  return optimize_family(PlanFamily::kNoAcceleration, cache, n_cap);
}

OptimalPlan optimize_cbspa(const PriorSpec& prior, const CostModel& cost, std::optional<int> n_cap,
                           const OptimizerOptions& options) {
  SearchCache cache(prior, cost, options);
  return optimize_family(PlanFamily::kFullAcceleration, cache, n_cap);
}

double relative_risk_saving(double r_ref, double r_b) {
  if (!(r_ref > 0.0)) throw std::invalid_argument("relative_risk_saving: reference risk must be > 0");
  return 100.0 * (r_ref - r_b) / r_ref;
}

ComparisonReport compare_plans(const PriorSpec& prior, const CostModel& cost, std::optional<int> n_cap,
                               const OptimizerOptions& options) {
  SearchCache cache(prior, cost, options);
  ComparisonReport r;
  r.bspaa = optimize_family(PlanFamily::kAdaptive, cache, n_cap);
  r.cbsp = optimize_family(PlanFamily::kNoAcceleration, cache, n_cap);
  r.cbspa = optimize_family(PlanFamily::kFullAcceleration, cache, n_cap);
  for (const OptimalPlan* other : {&r.cbsp, &r.cbspa}) {
    if (plan_preferred(other->plan, other->evaluation.bayes_risk, r.bspaa.plan, r.bspaa.evaluation.bayes_risk, cost,
                       options.tie_tol)) {
      r.bspaa.plan = other->plan;
      r.bspaa.evaluation = other->evaluation;
      r.bspaa.search_trace.push_back({other->plan, other->evaluation.bayes_risk});
    }
  }
  r.rrs1 = relative_risk_saving(r.cbsp.evaluation.bayes_risk, r.bspaa.evaluation.bayes_risk);
  r.rrs2 = relative_risk_saving(r.cbspa.evaluation.bayes_risk, r.bspaa.evaluation.bayes_risk);
  return r;
}

}  // namespace bspaa
