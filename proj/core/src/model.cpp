#include "bspaa/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bspaa/rng.hpp"

namespace bspaa {

void SamplingPlan::validate() const {
  if (sample_size < 0) throw std::invalid_argument("sample size must be non-negative");
  if (!(switch_time >= 0.0) || !(censor_time >= switch_time) || !std::isfinite(censor_time)) {
    throw std::invalid_argument("plan times must satisfy 0 <= t1 <= t2 < inf");
  }
  if (accel_threshold < 0 || accel_threshold > sample_size) {
    throw std::invalid_argument("acceleration threshold must lie in [0, n]");
  }
  if (sample_size == 0 && (switch_time != 0.0 || censor_time != 0.0)) {
    throw std::invalid_argument("a plan with n = 0 must be the no-sampling plan (0,0,0,0)");
  }
}

void ModelParams::validate() const {
  if (!(hazard > 0.0) || !std::isfinite(hazard)) throw std::invalid_argument("hazard must be > 0");
  if (!(accel_factor > 1.0) || !std::isfinite(accel_factor)) {
    throw std::invalid_argument("acceleration factor must be > 1");
  }
}

double cem_cdf(double t, const ModelParams& params, double switch_time, bool stress_raised) {
  params.validate();
  if (!(t >= 0.0)) throw std::invalid_argument("cem_cdf: t must be >= 0");
  const double lambda = params.hazard;
  if (!stress_raised || t < switch_time) return -std::expm1(-lambda * t);
  return -std::expm1(-lambda * switch_time - params.accel_factor * lambda * (t - switch_time));
}

double cem_pdf(double t, const ModelParams& params, double switch_time, bool stress_raised) {
  params.validate();
  if (!(t >= 0.0)) throw std::invalid_argument("cem_pdf: t must be >= 0");
  const double lambda = params.hazard;
  if (!stress_raised || t < switch_time) return lambda * std::exp(-lambda * t);
  const double raised = params.accel_factor * lambda;
  return raised * std::exp(-lambda * switch_time - raised * (t - switch_time));
}

TestOutcome simulate_test(const SamplingPlan& plan, const ModelParams& params, std::uint64_t seed) {
  if (plan.sample_size < 1) throw std::invalid_argument("simulate_test needs n >= 1");
  Engine rng = make_engine(seed);
  return simulate_test_with(plan, params, rng);
}

TestOutcome make_outcome(const SamplingPlan& plan, std::vector<double> failure_times) {
  plan.validate();
  std::sort(failure_times.begin(), failure_times.end());
  if (static_cast<int>(failure_times.size()) > plan.sample_size) {
    throw std::invalid_argument("more failures than items on test");
  }
  TestOutcome out;
  for (double z : failure_times) {
    if (!(z > 0.0) || z > plan.censor_time) {
      throw std::invalid_argument("failure time " + std::to_string(z) + " outside (0, t2]");
    }
    if (z <= plan.switch_time) ++out.failures1;
  }
  out.failures2 = static_cast<int>(failure_times.size()) - out.failures1;
  out.stress_raised = plan.raises_stress(out.failures1);
  out.failure_times = std::move(failure_times);
  return out;
}

SufficientStats sufficient_stats(const TestOutcome& outcome, const SamplingPlan& plan) {
  plan.validate();
  const int n = plan.sample_size;
  const double t1 = plan.switch_time;
  const double t2 = plan.censor_time;
  const auto& z = outcome.failure_times;
  const int d = static_cast<int>(z.size());
  if (d > n) throw std::invalid_argument("more failures than items on test");
  if (!std::is_sorted(z.begin(), z.end())) throw std::invalid_argument("failure times must be sorted");

  SufficientStats s;
  double sum_early = 0.0;
  double sum_late = 0.0;
  for (double zi : z) {
    if (!(zi > 0.0) || zi > t2) {
      throw std::invalid_argument("failure time " + std::to_string(zi) + " outside (0, t2]");
    }
    if (zi <= t1) {
      ++s.failures1;
      sum_early += zi;
    } else {
      sum_late += zi - t1;
    }
  }
  s.failures2 = d - s.failures1;
  if (s.failures1 != outcome.failures1 || s.failures2 != outcome.failures2) {
    throw std::invalid_argument("outcome failure counts disagree with its failure times");
  }
  if (outcome.stress_raised != plan.raises_stress(s.failures1)) {
    throw std::invalid_argument("outcome stress indicator disagrees with the plan threshold");
  }
  s.stress_raised = outcome.stress_raised;
  s.exposure1 = sum_early + (n - s.failures1) * t1;
  s.exposure2 = sum_late + (n - d) * (t2 - t1);
  return s;
}

double log_likelihood(const ModelParams& params, const SufficientStats& stats) {
  params.validate();
  const double lambda = params.hazard;
  const double phi = stats.stress_raised ? params.accel_factor : 1.0;
  return stats.failures() * std::log(lambda) + stats.failures2 * std::log(phi) -
         lambda * (stats.exposure1 + phi * stats.exposure2);
}

ExposureSupport exposure_support(const SamplingPlan& plan, int failures1, int failures2) {
  const int n = plan.sample_size;
  const int d = failures1 + failures2;
  if (failures1 < 0 || failures2 < 0 || d > n) throw std::invalid_argument("failure counts outside [0, n]");
  const double t1 = plan.switch_time;
  const double span = plan.post_switch_span();
  return {(n - failures1) * t1, n * t1, (n - d) * span, (n - failures1) * span};
}

}  // namespace bspaa
