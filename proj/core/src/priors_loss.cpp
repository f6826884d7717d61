#include "bspaa/priors_loss.hpp"

#include <cmath>
#include <stdexcept>

#include "bspaa/numerics.hpp"
#include "bspaa/rng.hpp"

namespace bspaa {

void PriorSpec::validate() const {
  if (!(shape > 0.0) || !(rate > 0.0) || !(accel_upper > 1.0) || !std::isfinite(shape) ||
      !std::isfinite(rate) || !std::isfinite(accel_upper)) {
    throw std::invalid_argument("prior needs shape > 0, rate > 0, accel_upper > 1");
  }
}

void CostModel::validate() const {
  const double parts[] = {item_cost, salvage, accel_cost, time_cost, reject_cost, loss0, loss1, loss2};
  for (double v : parts) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("cost components must be finite and >= 0");
  }
  if (!(salvage < item_cost)) throw std::invalid_argument("salvage value must be below the item cost");
}

double loss_h(double hazard, const CostModel& cost) {
  if (!(hazard >= 0.0)) throw std::invalid_argument("loss_h: hazard must be >= 0");
  return cost.loss0 + hazard * (cost.loss1 + cost.loss2 * hazard);
}

double prior_expected_loss(const PriorSpec& prior, const CostModel& cost) {
  prior.validate();
  const double a = prior.shape;
  const double b = prior.rate;
  return cost.loss0 + cost.loss1 * a / b + cost.loss2 * a * (a + 1.0) / (b * b);
}

NoSamplingResult no_sampling_risk(const PriorSpec& prior, const CostModel& cost) {
  const double accept = prior_expected_loss(prior, cost);
  if (accept <= cost.reject_cost) return {accept, Decision::kAccept};
  return {cost.reject_cost, Decision::kReject};
}

double perfect_information_risk(const PriorSpec& prior, const CostModel& cost) {
  prior.validate();
  // h is increasing, so min(h, Cr) switches to Cr past the crossing hazard.
  double crossing;
  if (cost.loss0 >= cost.reject_cost) {
    crossing = 0.0;
  } else if (cost.loss2 > 0.0) {
    const double disc = cost.loss1 * cost.loss1 + 4.0 * cost.loss2 * (cost.reject_cost - cost.loss0);
    crossing = (-cost.loss1 + std::sqrt(disc)) / (2.0 * cost.loss2);
  } else if (cost.loss1 > 0.0) {
    crossing = (cost.reject_cost - cost.loss0) / cost.loss1;
  } else {
    return cost.loss0;
  }
  // Partial gamma moments P(k) = int_0^x lambda^k p(lambda) dlambda via the
  // regularized lower incomplete gamma.
  const double a = prior.shape;
  const double b = prior.rate;
  const double x = b * crossing;
  const double p0 = numerics::reg_lower_gamma(a, x);
  const double p1 = numerics::reg_lower_gamma(a + 1.0, x) * a / b;
  const double p2 = numerics::reg_lower_gamma(a + 2.0, x) * a * (a + 1.0) / (b * b);
  return cost.loss0 * p0 + cost.loss1 * p1 + cost.loss2 * p2 + cost.reject_cost * (1.0 - p0);
}

ModelParams prior_sample(const PriorSpec& prior, std::uint64_t seed) {
  prior.validate();
  Engine rng = make_engine(seed);
  return prior_sample_with(prior, rng);
}

}  // namespace bspaa
