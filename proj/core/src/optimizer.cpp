#include "bspaa/optimizer.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bspaa/errors.hpp"

namespace bspaa {

int sample_size_bound(const PriorSpec& prior, const CostModel& cost) {
  prior.validate();
  cost.validate();
  const double margin = cost.item_cost - cost.salvage;
  if (!(margin > 0.0)) throw std::invalid_argument("sample size bound needs Cs > vs");
  const double cap = std::min(prior_expected_loss(prior, cost), cost.reject_cost);
  return static_cast<int>(std::floor(cap / margin + 1e-12));
}

double time_box_upper(const PriorSpec& prior) {
  if (prior.shape > 1.0) return 5.0 * prior.rate / (prior.shape - 1.0);
  return 5.0 * prior.rate / prior.shape;
}

bool plan_preferred(const SamplingPlan& a, double risk_a, const SamplingPlan& b, double risk_b,
                    const CostModel& cost, double tie_tol) {
  if (risk_a < risk_b - tie_tol) return true;
  if (risk_a > risk_b + tie_tol) return false;
  if (a.sample_size != b.sample_size) return a.sample_size < b.sample_size;
  if (a.accel_threshold != b.accel_threshold) {
    if (cost.accel_cost == 0.0 && cost.salvage == 0.0) {
      const bool full_a = a.accel_threshold == a.sample_size;
      const bool full_b = b.accel_threshold == b.sample_size;
      if (full_a != full_b) return full_a;
    }
    return a.accel_threshold < b.accel_threshold;
  }
  return a.censor_time < b.censor_time - 1e-9;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  return g;
}

struct SimplexProblem {
  std::function<double(double, double)> objective;
};

double simplex_trampoline(const gsl_vector* x, void* params) {
  auto* p = static_cast<SimplexProblem*>(params);
  return p->objective(gsl_vector_get(x, 0), gsl_vector_get(x, 1));
}

// Nelder-Mead (GSL nmsimplex2) from `start`; returns the best point seen.
std::pair<std::array<double, 2>, double> run_simplex(const std::function<double(double, double)>& f,
                                                     std::array<double, 2> start, double step, double tol,
                                                     int max_iter) {
  SimplexProblem problem{f};
  gsl_multimin_function fn{&simplex_trampoline, 2, &problem};
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* steps = gsl_vector_alloc(2);
  gsl_vector_set(x, 0, start[0]);
  gsl_vector_set(x, 1, start[1]);
  gsl_vector_set_all(steps, step);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
  gsl_multimin_fminimizer_set(s, &fn, x, steps);
  for (int it = 0; it < max_iter; ++it) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), tol) == GSL_SUCCESS) break;
  }
  const std::array<double, 2> best{gsl_vector_get(s->x, 0), gsl_vector_get(s->x, 1)};
  const double value = s->fval;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(steps);
  gsl_vector_free(x);
  return {best, value};
}

}  // namespace

SearchCache::SearchCache(const PriorSpec& prior, const CostModel& cost, const OptimizerOptions& options)
    : prior_(prior), cost_(cost), options_(options) {
  prior.validate();
  cost.validate();
  gsl_set_error_handler_off();
}

const TimesResult& SearchCache::cell(int n, int m) {
  if (n < 1 || m < 0 || m > n) throw std::invalid_argument("optimize_times: need 1 <= n and 0 <= m <= n");
  const auto key = std::make_pair(n, m);
  auto it = cells_.find(key);
  if (it != cells_.end()) return it->second;
  TimesResult r = m == 0 ? single_time(n) : two_times(n, m);
  return cells_.emplace(key, r).first->second;
}

const std::vector<SearchCache::GridPoint>& SearchCache::grid(int n) {
  auto it = grids_.find(n);
  if (it != grids_.end()) return it->second;
  const double lo = options_.box_lower;
  const double hi = time_box_upper(prior_);
  const std::vector<double> axis = log_grid(lo, hi, options_.grid_points);
  std::vector<GridPoint> pts;
  pts.reserve(axis.size() * axis.size());
  for (double t1 : axis) {
    for (double h : axis) {
      GridPoint p{t1, t1 + h, {}};
      try {
        p.by_threshold = bayes_risk_all_thresholds(n, t1, t1 + h, prior_, cost_, options_.risk);
      } catch (const ConvergenceError&) {
        continue;
      }
      pts.push_back(std::move(p));
    }
  }
  return grids_.emplace(n, std::move(pts)).first->second;
}

TimesResult SearchCache::single_time(int n) {
  const double lo = options_.box_lower;
  const double hi = time_box_upper(prior_);
  const auto risk_at = [&](double tau) {
    try {
      return bayes_risk({n, tau, tau, 0}, prior_, cost_, options_.risk).bayes_risk;
    } catch (const ConvergenceError&) {
      return kInf;
    }
  };
  const std::vector<double> axis = log_grid(lo, hi, options_.censor_grid_points);
  std::vector<double> values(axis.size());
  for (std::size_t i = 0; i < axis.size(); ++i) values[i] = risk_at(axis[i]);
  const std::size_t best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  const double a = std::log(axis[best == 0 ? 0 : best - 1]);
  const double b = std::log(axis[std::min(best + 1, axis.size() - 1)]);
  const auto [x, fx] = boost::math::tools::brent_find_minima([&](double u) { return risk_at(std::exp(u)); }, a, b, 40);
  TimesResult r;
  double tau = axis[best];
  if (fx < values[best]) {
    tau = std::exp(x);
    r.refined = true;
  }
  r.switch_time = tau;
  r.censor_time = tau;
  r.evaluation = bayes_risk({n, tau, tau, 0}, prior_, cost_, options_.risk);
  return r;
}

TimesResult SearchCache::two_times(int n, int m) {
  const std::vector<GridPoint>& pts = grid(n);
  if (pts.empty()) throw ConvergenceError("no grid point could be evaluated");
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  const auto risk_of = [&](std::size_t i) { return pts[i].by_threshold[static_cast<std::size_t>(m)].bayes_risk; };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return risk_of(a) < risk_of(b); });

  const double lo = options_.box_lower;
  const double hi = time_box_upper(prior_);
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  const auto objective = [&](double u1, double u2) {
    const double t1 = std::exp(std::clamp(u1, log_lo, log_hi));
    const double h = std::exp(std::clamp(u2, log_lo, log_hi));
    try {
      return bayes_risk({n, t1, t1 + h, m}, prior_, cost_, options_.risk).bayes_risk;
    } catch (const ConvergenceError&) {
      return kInf;
    }
  };

  const GridPoint& g0 = pts[order.front()];
  double best_t1 = g0.switch_time;
  double best_h = g0.censor_time - g0.switch_time;
  double best_risk = risk_of(order.front());
  const double grid_risk = best_risk;
  const int seeds = std::min<int>(options_.refine_seeds, static_cast<int>(order.size()));
  const double step = std::log(hi / lo) / (options_.grid_points - 1);
  for (int s = 0; s < seeds; ++s) {
    const GridPoint& g = pts[order[static_cast<std::size_t>(s)]];
    const auto [x, fx] = run_simplex(objective, {std::log(g.switch_time), std::log(g.censor_time - g.switch_time)},
                                     0.5 * step, options_.simplex_tol, options_.simplex_max_iter);
    if (fx < best_risk) {
      best_risk = fx;
      best_t1 = std::exp(std::clamp(x[0], log_lo, log_hi));
      best_h = std::exp(std::clamp(x[1], log_lo, log_hi));
    }
  }
  TimesResult r;
  r.refined = best_risk < grid_risk;
  r.switch_time = best_t1;
  r.censor_time = best_t1 + best_h;
  r.evaluation = bayes_risk({n, best_t1, best_t1 + best_h, m}, prior_, cost_, options_.risk);
  // A switch time pinned at the lower edge stands for switching at once.
  if (best_t1 <= lo * (1.0 + 1e-6)) {
    const PlanEvaluation at_zero = bayes_risk({n, 0.0, best_h, m}, prior_, cost_, options_.risk);
    if (at_zero.bayes_risk <= r.evaluation.bayes_risk + options_.tie_tol) {
      r.switch_time = 0.0;
      r.censor_time = best_h;
      r.evaluation = at_zero;
    }
  }
  return r;
}

TimesResult optimize_times(int n, int m, const PriorSpec& prior, const CostModel& cost,
                           const OptimizerOptions& options) {
  SearchCache cache(prior, cost, options);
  return cache.cell(n, m);
}

OptimalPlan optimize_family(PlanFamily family, SearchCache& cache, std::optional<int> n_cap) {
  const PriorSpec& prior = cache.prior();
  const CostModel& cost = cache.cost();
  const OptimizerOptions& opt = cache.options();

  OptimalPlan best;
  best.plan = SamplingPlan::no_sampling();
  best.evaluation = bayes_risk(best.plan, prior, cost, opt.risk);
  best.search_trace.push_back({best.plan, best.evaluation.bayes_risk});

  int n_max = std::min(sample_size_bound(prior, cost), kMaxSampleSize);
  if (n_cap) n_max = std::min(n_max, *n_cap);
  const double floor_risk = perfect_information_risk(prior, cost);
  const double margin = cost.item_cost - cost.salvage;

  int stale = 0;
  for (int n = 1; n <= n_max; ++n) {
    // No plan with n items can beat n(Cs - vs) + E[min(h, Cr)].
    if (n * margin + floor_risk >= best.evaluation.bayes_risk + opt.tie_tol) break;
    int m_lo = 0;
    int m_hi = n;
    if (family == PlanFamily::kNoAcceleration) m_hi = 0;
    if (family == PlanFamily::kFullAcceleration) m_lo = n;
    bool improved = false;
    for (int m = m_lo; m <= m_hi; ++m) {
      const TimesResult& c = cache.cell(n, m);
      const SamplingPlan plan{n, c.switch_time, c.censor_time, m};
      if (plan_preferred(plan, c.evaluation.bayes_risk, best.plan, best.evaluation.bayes_risk, cost, opt.tie_tol)) {
        best.plan = plan;
        best.evaluation = c.evaluation;
        best.search_trace.push_back({plan, c.evaluation.bayes_risk});
        improved = true;
      }
    }
    stale = improved ? 0 : stale + 1;
    if (stale >= opt.patience) break;
  }
  return best;
}

OptimalPlan optimize_plan(const PriorSpec& prior, const CostModel& cost, std::optional<int> n_cap,
                          const OptimizerOptions& options) {
  SearchCache cache(prior, cost, options);
  return optimize_family(PlanFamily::kAdaptive, cache, n_cap);
}

}  // namespace bspaa
