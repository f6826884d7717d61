#pragma once

#include <algorithm>
#include <cmath>
#include <random>

namespace bspaa {

template <class Rng>
TestOutcome simulate_test_with(const SamplingPlan& plan, const ModelParams& params, Rng& rng) {
  plan.validate();
  params.validate();
  const int n = plan.sample_size;
  const double t1 = plan.switch_time;
  const double t2 = plan.censor_time;
  const double lambda = params.hazard;

  // Unit exposures E ~ Exp(1); an item fails once its accumulated hazard
  // reaches E, which is exact inverse-CDF sampling under the CEM.
  std::exponential_distribution<double> unit(1.0);
  std::vector<double> exposure(static_cast<std::size_t>(n));
  for (double& e : exposure) e = unit(rng);

  const double hazard_at_switch = lambda * t1;
  int early = 0;
  for (double e : exposure) {
    if (e <= hazard_at_switch) ++early;
  }
  const bool raised = plan.raises_stress(early);
  const double late_rate = raised ? params.accel_factor * lambda : lambda;

  TestOutcome out;
  out.stress_raised = raised;
  out.failure_times.reserve(static_cast<std::size_t>(n));
  for (double e : exposure) {
    // Clamp so rounding never moves a failure across the switch time.
    const double y = e <= hazard_at_switch
                         ? std::min(e / lambda, t1)
                         : std::max(t1 + (e - hazard_at_switch) / late_rate, std::nextafter(t1, t2 + 1.0));
    if (y <= t2) out.failure_times.push_back(y);
  }
  std::sort(out.failure_times.begin(), out.failure_times.end());
  out.failures1 = early;
  out.failures2 = static_cast<int>(out.failure_times.size()) - early;
  return out;
}

}  // namespace bspaa
