#pragma once

#include <cstdint>

#include "bspaa/model.hpp"

namespace bspaa {

/// Gamma(shape, rate) prior on the baseline hazard and Uniform(1, accel_upper)
/// prior on the acceleration factor, independent.
struct PriorSpec {
  double shape = 1.0;
  double rate = 1.0;
  double accel_upper = 2.0;

  void validate() const;
  double hazard_mean() const { return shape / rate; }
};

struct CostModel {
  double item_cost = 0.0;     // per item put on test
  double salvage = 0.0;       // recovered per surviving item
  double accel_cost = 0.0;    // per item moved to the raised stress
  double time_cost = 0.0;     // per unit of test duration
  double reject_cost = 0.0;   // fixed cost of rejecting the lot
  double loss0 = 0.0;         // acceptance loss h(lambda) = loss0 + loss1*lambda + loss2*lambda^2
  double loss1 = 0.0;
  double loss2 = 0.0;

  void validate() const;
};

enum class Decision { kReject = 0, kAccept = 1 };

/// Quadratic acceptance loss.
double loss_h(double hazard, const CostModel& cost);

/// Prior mean of the acceptance loss: a0 + a1*alpha/beta + a2*alpha(alpha+1)/beta^2.
double prior_expected_loss(const PriorSpec& prior, const CostModel& cost);

struct NoSamplingResult {
  double risk;
  Decision decision;
};

/// Decide from the prior alone. Ties go to acceptance.
NoSamplingResult no_sampling_risk(const PriorSpec& prior, const CostModel& cost);

/// E[min(h(lambda), Cr)] under the prior: the risk of deciding with the hazard
/// known exactly. No test can do better, which gives a sample-size lower bound.
double perfect_information_risk(const PriorSpec& prior, const CostModel& cost);

ModelParams prior_sample(const PriorSpec& prior, std::uint64_t seed);

template <class Rng>
ModelParams prior_sample_with(const PriorSpec& prior, Rng& rng);

}  // namespace bspaa

#include <random>

namespace bspaa {

template <class Rng>
ModelParams prior_sample_with(const PriorSpec& prior, Rng& rng) {
  std::gamma_distribution<double> hazard(prior.shape, 1.0 / prior.rate);
  std::uniform_real_distribution<double> accel(1.0, prior.accel_upper);
  ModelParams p;
  do {
    p.hazard = hazard(rng);
  } while (!(p.hazard > 0.0));
  do {
    p.accel_factor = accel(rng);
  } while (!(p.accel_factor > 1.0));
  return p;
}

}  // namespace bspaa
