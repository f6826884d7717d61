#pragma once

// Lifetime model for the adaptive simple step-stress test: exponential
// lifetimes under the cumulative exposure model, with the stress raised at the
// switch time only when fewer than `accel_threshold` items have failed.

#include <cstdint>
#include <vector>

namespace bspaa {

/// Decision vector of the adaptive test: put `sample_size` items on test,
/// inspect at `switch_time`, raise the stress if fewer than `accel_threshold`
/// failures were seen, censor at `censor_time`.
struct SamplingPlan {
  int sample_size = 0;
  double switch_time = 0.0;
  double censor_time = 0.0;
  int accel_threshold = 0;

  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
  bool is_no_sampling() const { return sample_size == 0; }
  double post_switch_span() const { return censor_time - switch_time; }
  /// The stress is raised after the switch time iff this returns true.
  bool raises_stress(int failures_before_switch) const {
    return failures_before_switch < accel_threshold;
  }

  static SamplingPlan no_sampling() { return {}; }
};

/// Baseline hazard and the multiplicative acceleration of the hazard under the
/// raised stress.
struct ModelParams {
  double hazard = 0.0;
  double accel_factor = 1.0;

  void validate() const;
};

struct TestOutcome {
  std::vector<double> failure_times;  // ascending, all in (0, censor_time]
  int failures1 = 0;                  // failures in (0, switch_time]
  int failures2 = 0;                  // failures in (switch_time, censor_time]
  bool stress_raised = false;
};

/// Reduced data: total time on test before and after the switch time, the two
/// failure counts, and whether the stress was raised.
struct SufficientStats {
  double exposure1 = 0.0;
  double exposure2 = 0.0;
  int failures1 = 0;
  int failures2 = 0;
  bool stress_raised = false;

  int failures() const { return failures1 + failures2; }
};

/// CDF of a lifetime under the cumulative exposure model.
double cem_cdf(double t, const ModelParams& params, double switch_time, bool stress_raised);
double cem_pdf(double t, const ModelParams& params, double switch_time, bool stress_raised);

/// Simulates one adaptive test. Deterministic for a fixed seed.
TestOutcome simulate_test(const SamplingPlan& plan, const ModelParams& params, std::uint64_t seed);

/// Same as above but drawing the unit exposures from a caller-provided
/// generator; used by the Monte-Carlo oracle to avoid reseeding per item.
template <class Rng>
TestOutcome simulate_test_with(const SamplingPlan& plan, const ModelParams& params, Rng& rng);

/// Builds the outcome record (counts and stress indicator) from raw failure
/// times of one test run under `plan`.
TestOutcome make_outcome(const SamplingPlan& plan, std::vector<double> failure_times);

SufficientStats sufficient_stats(const TestOutcome& outcome, const SamplingPlan& plan);

/// Log-likelihood of the reduced data, dropping the additive constant
/// log(n!/(n-d)!).
double log_likelihood(const ModelParams& params, const SufficientStats& stats);

/// Support of the exposure statistics for fixed failure counts.
struct ExposureSupport {
  double exposure1_min, exposure1_max;
  double exposure2_min, exposure2_max;
};
ExposureSupport exposure_support(const SamplingPlan& plan, int failures1, int failures2);

}  // namespace bspaa

#include "bspaa/detail/model_impl.hpp"
