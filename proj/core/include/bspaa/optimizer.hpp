#pragma once

// Search for the Bayes-risk-minimizing plan: continuous search over the two
// test times for each (n, m), then enumeration of m and n.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "bspaa/model.hpp"
#include "bspaa/priors_loss.hpp"
#include "bspaa/risk.hpp"

namespace bspaa {

struct OptimizerOptions {
  RiskOptions risk;
  int grid_points = 12;          // per axis, log-spaced over (t1, t2 - t1)
  int refine_seeds = 3;          // best grid points handed to the simplex
  double simplex_tol = 1e-5;     // simplex size, in log coordinates
  int simplex_max_iter = 500;
  int censor_grid_points = 24;   // for the single-time (m = 0) search
  double box_lower = 0.005;
  int patience = 3;              // sample sizes without improvement before n stops growing
  double tie_tol = 1e-9;
};

struct TraceEntry {
  SamplingPlan plan;
  double risk;
};

struct OptimalPlan {
  SamplingPlan plan;
  PlanEvaluation evaluation;
  std::vector<TraceEntry> search_trace;  // successive incumbents
};

struct TimesResult {
  double switch_time = 0.0;
  double censor_time = 0.0;
  PlanEvaluation evaluation;
  bool refined = false;  // local search improved on the best grid point
};

/// floor(min{E[h], Cr} / (Cs - vs)).
int sample_size_bound(const PriorSpec& prior, const CostModel& cost);

/// Upper end of the search box for both times.
double time_box_upper(const PriorSpec& prior);

/// Which values of m a search may use.
enum class PlanFamily {
  kAdaptive,            // 0 <= m <= n
  kNoAcceleration,      // m = 0, a single censoring time
  kFullAcceleration,    // m = n
};

/// Memo of per-(n, m) optima shared by searches over the same configuration.
class SearchCache {
 public:
  SearchCache(const PriorSpec& prior, const CostModel& cost, const OptimizerOptions& options);

  const TimesResult& cell(int n, int m);

  const PriorSpec& prior() const { return prior_; }
  const CostModel& cost() const { return cost_; }
  const OptimizerOptions& options() const { return options_; }

 private:
  struct GridPoint {
    double switch_time, censor_time;
    std::vector<PlanEvaluation> by_threshold;
  };
  const std::vector<GridPoint>& grid(int n);
  TimesResult single_time(int n);
  TimesResult two_times(int n, int m);

  PriorSpec prior_;
  CostModel cost_;
  OptimizerOptions options_;
  std::map<int, std::vector<GridPoint>> grids_;
  std::map<std::pair<int, int>, TimesResult> cells_;
};

TimesResult optimize_times(int n, int m, const PriorSpec& prior, const CostModel& cost,
                           const OptimizerOptions& options = {});

OptimalPlan optimize_family(PlanFamily family, SearchCache& cache, std::optional<int> n_cap = std::nullopt);

OptimalPlan optimize_plan(const PriorSpec& prior, const CostModel& cost, std::optional<int> n_cap = std::nullopt,
                          const OptimizerOptions& options = {});

/// Strict preference between two evaluated plans: lower risk, then smaller n,
/// smaller m and smaller t2 inside the tie tolerance. With Ca = 0 and vs = 0
/// ties favour m = n.
bool plan_preferred(const SamplingPlan& a, double risk_a, const SamplingPlan& b, double risk_b,
                    const CostModel& cost, double tie_tol);

}  // namespace bspaa
