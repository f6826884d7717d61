#include "bspaa/risk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bspaa/errors.hpp"

namespace bspaa {

namespace {

using numerics::binomial;

void check_capability(int n) {
  if (n > kMaxSampleSize) {
    throw CapabilityError("sample size " + std::to_string(n) + " exceeds the supported maximum of " +
                          std::to_string(kMaxSampleSize));
  }
}

// expm1(x * y) / x, continuous at x = 0.
double expm1_ratio(double x, double y) {
  if (std::abs(x * y) < 1e-300 || x == 0.0) return y;
  return std::expm1(x * y) / x;
}

// E[exp(-lambda * s)] under the gamma prior.
double gamma_laplace(const PriorSpec& prior, double s) { return std::exp(-prior.shape * std::log1p(s / prior.rate)); }

// E[exp(-lambda (c + phi * span))] with phi ~ U(1, l) as well.
double gamma_laplace_accel(const PriorSpec& prior, double c, double span) {
  if (span == 0.0) return gamma_laplace(prior, c);
  const double b = prior.rate;
  const double l = prior.accel_upper;
  const double lo = (b + c + span) / b;
  const double log_ratio = std::log((b + c + l * span) / (b + c + span));
  return b / ((l - 1.0) * span) * std::pow(lo, -prior.shape) * lo *
         expm1_ratio(1.0 - prior.shape, log_ratio);
}

// int_0^s E[exp(-lambda u)] du.
double laplace_integral(const PriorSpec& prior, double s) {
  return prior.rate * expm1_ratio(1.0 - prior.shape, std::log1p(s / prior.rate));
}

struct RowTerms {
  double region = 0.0;    // sum over d2 of H(d1, d2)
  double failures = 0.0;  // contribution of row d1 to n - E[D]
  double duration = 0.0;  // contribution of row d1 to (t2 - t1) - E[tau after t1]
};

class RowEvaluator {
 public:
  RowEvaluator(int n, double t1, double t2, const PriorSpec& prior, const CostModel& cost,
               const RiskOptions& options)
      : n_(n), t1_(t1), span_(t2 - t1), prior_(prior), cost_(cost), options_(options) {}

  double accelerated(int d1) const {
    numerics::KahanSum s;
    for (int k = 0; k <= d1; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      s.add(sign * binomial(d1, k) * gamma_laplace(prior_, (n_ - d1 + k) * t1_));
    }
    return (n_ - d1) * binomial(n_, d1) * s.value();
  }

  double early_duration() const {
    numerics::KahanSum s;
    for (int k = 1; k <= n_; ++k) {
      const double sign = (k % 2 == 1) ? 1.0 : -1.0;
      s.add(sign * binomial(n_, k) * laplace_integral(prior_, k * t1_) / k);
    }
    return s.value();
  }

  RowTerms row(int d1, bool raised) const {
    RowTerms r;
    r.failures = row_failures(d1, raised);
    r.duration = row_duration(d1, raised);
    // Any threshold with the right delta for this row gives the same cells.
    const SamplingPlan plan{n_, t1_, t1_ + span_, raised ? d1 + 1 : 0};
    for (int d2 = 0; d2 <= n_ - d1; ++d2) {
      const DecisionThresholds th(d1, d2, plan, prior_, cost_, options_.h1_method);
      r.region += rejection_region_term(d1, d2, plan, prior_, cost_, th, options_);
    }
    return r;
  }

  double row_failures(int d1, bool raised) const {
    if (d1 == n_) return 0.0;
    numerics::KahanSum s;
    for (int k = 0; k <= d1; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      const double c = (n_ - d1 + k) * t1_;
      const double g = raised ? gamma_laplace_accel(prior_, c, span_) : gamma_laplace(prior_, c + span_);
      s.add(sign * binomial(d1, k) * g);
    }
    return (n_ - d1) * binomial(n_, d1) * s.value();
  }

  double row_duration(int d1, bool raised) const {
    if (!(span_ > 0.0)) return 0.0;
    return duration_sum(d1, raised);
  }

 private:
  // int_0^span E[exp(-lambda (c + phi^delta k u))] du
  double duration_kernel(double c, int k, bool raised) const {
    if (k == 0) return span_ * gamma_laplace(prior_, c);
    const double base = laplace_integral(prior_, c);
    if (!raised) return (laplace_integral(prior_, c + k * span_) - base) / k;
    const double l = prior_.accel_upper;
    const auto f = [&](double phi) { return (laplace_integral(prior_, c + k * phi * span_) - base) / (k * phi); };
    return numerics::integrate(f, 1.0, l, numerics::gauss_legendre(options_.phi_order)) / (l - 1.0);
  }

  double duration_sum(int d1, bool raised) const {
    numerics::KahanSum s;
    const int rest = n_ - d1;
    for (int j = 0; j <= d1; ++j) {
      const double c = (rest + j) * t1_;
      for (int k = 0; k <= rest; ++k) {
        const double sign = ((j + k) % 2 == 0) ? 1.0 : -1.0;
        s.add(sign * binomial(d1, j) * binomial(rest, k) * duration_kernel(c, k, raised));
      }
    }
    return binomial(n_, d1) * s.value();
  }

  int n_;
  double t1_, span_;
  PriorSpec prior_;
  CostModel cost_;
  RiskOptions options_;
};

PlanEvaluation assemble(int m, const std::vector<RowTerms>& plain,
                        const std::vector<RowTerms>& raised, const std::vector<double>& accel, double early,
                        int n, double t1, double t2, const PriorSpec& prior, const CostModel& cost,
                        const RiskOptions& options) {
  PlanEvaluation e;
  double ed = n;
  double tau = early + (t2 - t1);
  double nas = 0.0;
  double r1 = prior_expected_loss(prior, cost);
  for (int d1 = 0; d1 <= n; ++d1) {
    const RowTerms& r = d1 < m ? raised[static_cast<std::size_t>(d1)] : plain[static_cast<std::size_t>(d1)];
    ed -= r.failures;
    tau -= r.duration;
    r1 += r.region;
    if (d1 < m) nas += accel[static_cast<std::size_t>(d1)];
  }
  e.expected_failures = std::clamp(ed, 0.0, static_cast<double>(n));
  e.expected_duration = std::clamp(tau, 0.0, t2);
  e.expected_accelerated = std::clamp(nas, 0.0, static_cast<double>(n));
  e.r1_term = r1;
  const double ed_coef = options.ed_coefficient == EdCoefficient::kSalvage ? cost.salvage : 1.0;
  e.bayes_risk = n * (cost.item_cost - cost.salvage) + cost.accel_cost * e.expected_accelerated +
                 ed_coef * e.expected_failures + cost.time_cost * e.expected_duration + r1;
  return e;
}

PlanEvaluation no_sampling_evaluation(const PriorSpec& prior, const CostModel& cost) {
  PlanEvaluation e;
  e.bayes_risk = no_sampling_risk(prior, cost).risk;
  e.r1_term = e.bayes_risk;
  return e;
}

}  // namespace

// ---------------------------------------------------------------------------

double expected_failures(const SamplingPlan& plan, const PriorSpec& prior) {
  plan.validate();
  prior.validate();
  const int n = plan.sample_size;
  if (n == 0) return 0.0;
  check_capability(n);
  const RowEvaluator ev(n, plan.switch_time, plan.censor_time, prior, CostModel{}, RiskOptions{});
  double ed = n;
  for (int d1 = 0; d1 <= n; ++d1) {
    const bool raised = plan.raises_stress(d1);
    ed -= ev.row_failures(d1, raised);
  }
  return std::clamp(ed, 0.0, static_cast<double>(n));
}

double expected_accelerated_items(const SamplingPlan& plan, const PriorSpec& prior) {
  plan.validate();
  prior.validate();
  const int n = plan.sample_size;
  if (n == 0) return 0.0;
  check_capability(n);
  const RowEvaluator ev(n, plan.switch_time, plan.censor_time, prior, CostModel{}, RiskOptions{});
  double nas = 0.0;
  for (int d1 = 0; d1 < std::min(plan.accel_threshold, n + 1); ++d1) nas += ev.accelerated(d1);
  return std::clamp(nas, 0.0, static_cast<double>(n));
}

double expected_duration(const SamplingPlan& plan, const PriorSpec& prior, const RiskOptions& options) {
  plan.validate();
  prior.validate();
  const int n = plan.sample_size;
  if (n == 0) return 0.0;
  check_capability(n);
  const RowEvaluator ev(n, plan.switch_time, plan.censor_time, prior, CostModel{}, options);
  double tau = ev.early_duration() + plan.post_switch_span();
  for (int d1 = 0; d1 <= n; ++d1) tau -= ev.row_duration(d1, plan.raises_stress(d1));
  return std::clamp(tau, 0.0, plan.censor_time);
}

std::vector<JointDensityTerm> joint_density_terms(int failures1, int failures2, const SamplingPlan& plan) {
  plan.validate();
  const int n = plan.sample_size;
  const int d = failures1 + failures2;
  if (failures1 < 0 || failures2 < 0 || d > n) throw std::invalid_argument("failure counts outside [0, n]");
  const double t1 = plan.switch_time;
  const double span = plan.post_switch_span();
  const double base = binomial(n, failures1) * binomial(n - failures1, failures2);
  std::vector<JointDensityTerm> terms;
  for (int j = 0; j <= failures1; ++j) {
    for (int k = 0; k <= failures2; ++k) {
      const double sign = ((j + k) % 2 == 0) ? 1.0 : -1.0;
      terms.push_back({sign * base * binomial(failures1, j) * binomial(failures2, k), (n - failures1 + j) * t1,
                       (n - d + k) * span});
    }
  }
  return terms;
}

double joint_density(const SufficientStats& stats, const ModelParams& params, const SamplingPlan& plan) {
  plan.validate();
  params.validate();
  const int n = plan.sample_size;
  const int d1 = stats.failures1;
  const int d2 = stats.failures2;
  if (d1 < 0 || d2 < 0 || d1 + d2 > n) return 0.0;
  if (stats.stress_raised != plan.raises_stress(d1)) return 0.0;
  const double t1 = plan.switch_time;
  const double span = plan.post_switch_span();
  if ((d1 > 0 && !(t1 > 0.0)) || (d2 > 0 && !(span > 0.0))) return 0.0;
  const ExposureSupport s = exposure_support(plan, d1, d2);
  const double w1 = stats.exposure1;
  const double w2 = stats.exposure2;
  const double eps1 = 1e-12 * std::max(1.0, s.exposure1_max);
  const double eps2 = 1e-12 * std::max(1.0, s.exposure2_max);
  double shape = binomial(n, d1) * binomial(n - d1, d2);
  if (d1 == 0) {
    if (std::abs(w1 - s.exposure1_max) > eps1) return 0.0;
  } else {
    if (w1 < s.exposure1_min - eps1 || w1 > s.exposure1_max + eps1) return 0.0;
    shape *= std::pow(t1, d1) * numerics::uniform_sum_density(w1 - s.exposure1_min, d1, t1);
  }
  if (d2 == 0) {
    if (std::abs(w2 - s.exposure2_max) > eps2) return 0.0;
  } else {
    if (w2 < s.exposure2_min - eps2 || w2 > s.exposure2_max + eps2) return 0.0;
    shape *= std::pow(span, d2) * numerics::uniform_sum_density(w2 - s.exposure2_min, d2, span);
  }
  const double lambda = params.hazard;
  const double accel = stats.stress_raised ? params.accel_factor : 1.0;
  const double log_kernel = (d1 + d2) * std::log(lambda) + d2 * std::log(accel) - lambda * (w1 + accel * w2);
  return shape * std::exp(log_kernel);
}

double rejection_region_term(int failures1, int failures2, const SamplingPlan& plan, const PriorSpec& prior,
                             const CostModel& cost, const DecisionThresholds& thresholds,
                             const RiskOptions& options) {
  const int n = plan.sample_size;
  const int d1 = failures1;
  const int d2 = failures2;
  if (d1 < 0 || d2 < 0 || d1 + d2 > n) throw std::invalid_argument("failure counts outside [0, n]");
  if (thresholds.empty()) return 0.0;
  const double t1 = plan.switch_time;
  const double span = plan.post_switch_span();
  if ((d1 > 0 && !(t1 > 0.0)) || (d2 > 0 && !(span > 0.0))) return 0.0;

  const ExposureSupport s = exposure_support(plan, d1, d2);
  const double a1 = s.exposure1_min;
  const double b1 = s.exposure1_max;
  const double a2 = s.exposure2_min;
  const double b2 = s.exposure2_max;
  const double cr = cost.reject_cost;
  const PosteriorLoss& phi = thresholds.loss();

  double log_k = prior.shape * std::log(prior.rate) - numerics::log_gamma(prior.shape) -
                 std::log(prior.accel_upper - 1.0) + std::log(binomial(n, d1)) + std::log(binomial(n - d1, d2));
  if (d1 > 0) log_k += d1 * std::log(t1);
  if (d2 > 0) log_k += d2 * std::log(span);

  const auto integrand = [&](double w1, double w2) {
    const auto [value, log_h0] = phi.value_log_h0(w1, w2);
    if (!(value > cr)) return 0.0;
    double g = std::exp(log_k + log_h0) * (cr - value);
    if (d1 > 0) g *= numerics::uniform_sum_density(w1 - a1, d1, t1);
    if (d2 > 0) g *= numerics::uniform_sum_density(w2 - a2, d2, span);
    return g;
  };

  const numerics::QuadratureRule& rule = numerics::gauss_legendre(options.region_order);
  std::vector<double> knots1;
  std::vector<double> knots2;
  for (int i = 1; i < d1; ++i) knots1.push_back(a1 + i * t1);
  for (int i = 1; i < d2; ++i) knots2.push_back(a2 + i * span);

  if (d1 == 0 && d2 == 0) return integrand(b1, b2);
  if (d1 == 0) {
    const double upper = thresholds.w2_crossing(b1, a2).value;
    if (!(upper > a2)) return 0.0;
    return numerics::integrate_pieces([&](double w2) { return integrand(b1, w2); }, a2, upper, knots2, rule);
  }
  if (d2 == 0) {
    const double upper = thresholds.c2(b2, a1, 0.5 * (a1 + b1)).value;
    if (!(upper > a1)) return 0.0;
    return numerics::integrate_pieces([&](double w1) { return integrand(w1, b2); }, a1, upper, knots1, rule);
  }

  // Rejection needs phi(a1, w2) > Cr, i.e. w2 below the crossing at the
  // smallest w1; below the crossing at the largest w1 the whole w1 support
  // rejects.
  const double w2_end = thresholds.w2_crossing(a1, a2).value;
  if (!(w2_end > a2)) return 0.0;
  const double w2_full = std::min(thresholds.w2_crossing(b1, a2).value, w2_end);
  std::vector<double> breaks2 = knots2;
  breaks2.push_back(w2_full);
  std::sort(breaks2.begin(), breaks2.end());

  double guess = 0.5 * (a1 + b1);
  const auto outer = [&](double w2) {
    double upper = b1;
    if (w2 >= w2_full) {
      upper = thresholds.c2(w2, a1, guess).value;
      guess = upper;
    }
    if (!(upper > a1)) return 0.0;
    return numerics::integrate_pieces([&](double w1) { return integrand(w1, w2); }, a1, upper, knots1, rule);
  };
  return numerics::integrate_pieces(outer, a2, w2_end, breaks2, rule);
}

PlanEvaluation bayes_risk(const SamplingPlan& plan, const PriorSpec& prior, const CostModel& cost,
                          const RiskOptions& options) {
  plan.validate();
  prior.validate();
  cost.validate();
  const int n = plan.sample_size;
  if (n == 0) return no_sampling_evaluation(prior, cost);
  check_capability(n);
  const double t1 = plan.switch_time;
  const double t2 = plan.censor_time;
  const int m = plan.accel_threshold;
  const RowEvaluator ev(n, t1, t2, prior, cost, options);
  std::vector<RowTerms> plain(static_cast<std::size_t>(n) + 1);
  std::vector<RowTerms> raised(static_cast<std::size_t>(n) + 1);
  std::vector<double> accel(static_cast<std::size_t>(n) + 1, 0.0);
  for (int d1 = 0; d1 <= n; ++d1) {
    if (d1 < m) {
      raised[static_cast<std::size_t>(d1)] = ev.row(d1, true);
      accel[static_cast<std::size_t>(d1)] = ev.accelerated(d1);
    } else {
      plain[static_cast<std::size_t>(d1)] = ev.row(d1, false);
    }
  }
  return assemble(m, plain, raised, accel, ev.early_duration(), n, t1, t2, prior, cost, options);
}

std::vector<PlanEvaluation> bayes_risk_all_thresholds(int sample_size, double switch_time, double censor_time,
                                                      const PriorSpec& prior, const CostModel& cost,
                                                      const RiskOptions& options) {
  const int n = sample_size;
  const SamplingPlan probe{n, switch_time, censor_time, n};
  probe.validate();
  prior.validate();
  cost.validate();
  if (n == 0) return {no_sampling_evaluation(prior, cost)};
  check_capability(n);
  const RowEvaluator ev(n, switch_time, censor_time, prior, cost, options);
  std::vector<RowTerms> plain(static_cast<std::size_t>(n) + 1);
  std::vector<RowTerms> raised(static_cast<std::size_t>(n) + 1);
  std::vector<double> accel(static_cast<std::size_t>(n) + 1, 0.0);
  for (int d1 = 0; d1 <= n; ++d1) {
    plain[static_cast<std::size_t>(d1)] = ev.row(d1, false);
    if (d1 < n) {
      raised[static_cast<std::size_t>(d1)] = ev.row(d1, true);
      accel[static_cast<std::size_t>(d1)] = ev.accelerated(d1);
    }
  }
  const double early = ev.early_duration();
  std::vector<PlanEvaluation> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) {
    out.push_back(assemble(m, plain, raised, accel, early, n, switch_time, censor_time, prior, cost, options));
  }
  return out;
}

}  // namespace bspaa
