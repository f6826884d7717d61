#pragma once

// Special functions, Gauss-Legendre quadrature, monotone root search and the
// posterior normalising integral H1 shared by the decision and risk modules.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "bspaa/priors_loss.hpp"

namespace bspaa::numerics {

/// Every numerical tolerance used by the library lives here.
struct Tolerances {
  int quadrature_order = 64;          // starting Gauss-Legendre order
  int quadrature_max_order = 512;     // doubling cap
  double quadrature_rel_tol = 1e-9;   // successive-estimate agreement
  double root_abs_tol = 1e-8;         // bisection width
  int h1_order = 64;                  // fixed order for the H1 integral over phi
  double h1_rel_tol = 1e-12;          // adaptive H1 (reference path)
  double h1_agreement_tol = 1e-6;     // closed form vs quadrature
};

const Tolerances& default_tolerances();

// ---------------------------------------------------------------------------
// Special functions

/// log Gamma(x) for x > 0 (Lanczos approximation, g = 671/128).
double log_gamma(double x);
double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double x, double a, double b);

/// Lower and upper regularized incomplete beta at x, with 1 - x passed
/// separately so that both tails keep full relative accuracy.
struct BetaTails {
  double lower;  // I_x(a, b)
  double upper;  // 1 - I_x(a, b) = I_{1-x}(b, a)
};
BetaTails inc_beta_tails(double x, double one_minus_x, double a, double b, double log_beta_ab);

/// Regularized lower incomplete gamma P(a, x).
double reg_lower_gamma(double a, double x);

/// Density of the sum of `count` iid Uniform(0, width) variables (a scaled
/// cardinal B-spline), evaluated by the Cox-de Boor recursion rather than the
/// alternating binomial sum.
double uniform_sum_density(double x, int count, double width);

// ---------------------------------------------------------------------------
// Quadrature

struct QuadratureRule {
  std::vector<double> nodes;    // on (-1, 1), ascending
  std::vector<double> weights;  // positive, sum to 2
  int order() const { return static_cast<int>(nodes.size()); }
};

/// Gauss-Legendre rule of the given order; rules are built once and shared.
const QuadratureRule& gauss_legendre(int order);

template <class F>
double integrate(F&& f, double lo, double hi, const QuadratureRule& rule) {
  if (hi == lo) return 0.0;
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (int i = 0; i < rule.order(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;  // |last - previous| estimate
  int order = 0;
  bool converged = false;
};

/// Gauss-Legendre with node doubling until successive estimates agree to
/// `rel_tol` (relative, with an absolute floor of rel_tol * 1e-300) or
/// `max_order` is reached; non-convergence is reported, not thrown.
template <class F>
IntegralResult integrate_adaptive(F&& f, double lo, double hi, int start_order = 64,
                                  double rel_tol = 1e-9, int max_order = 512) {
  IntegralResult r;
  if (hi == lo) {
    r.converged = true;
    return r;
  }
  int order = start_order;
  double prev = integrate(f, lo, hi, gauss_legendre(order));
  while (true) {
    const int next = order * 2;
    if (next > max_order) {
      r.value = prev;
      r.order = order;
      r.converged = false;
      return r;
    }
    const double cur = integrate(f, lo, hi, gauss_legendre(next));
    r.error = std::abs(cur - prev);
    order = next;
    if (r.error <= rel_tol * std::abs(cur) || r.error == 0.0) {
      r.value = cur;
      r.order = order;
      r.converged = true;
      return r;
    }
    prev = cur;
  }
}

/// Integrates over [lo, hi] splitting at the given interior breakpoints (the
/// integrand may have kinks there). Fixed rule on each piece.
template <class F>
double integrate_pieces(F&& f, double lo, double hi, std::span<const double> breaks,
                        const QuadratureRule& rule) {
  double total = 0.0;
  double a = lo;
  for (double b : breaks) {
    if (b <= a) continue;
    if (b >= hi) break;
    total += integrate(f, a, b, rule);
    a = b;
  }
  if (hi > a) total += integrate(f, a, hi, rule);
  return total;
}

// ---------------------------------------------------------------------------
// Root search

enum class Bracket {
  kCrossing,          // sign change found, root returned
  kNoCrossingBelow,   // f < 0 on the whole interval; lo returned
  kNoCrossingAbove,   // f > 0 on the whole interval; hi returned
};

struct RootResult {
  double root = 0.0;
  Bracket status = Bracket::kCrossing;
  int iterations = 0;
};

/// Bisection for a monotone f on [lo, hi] to absolute width `tol`.
/// Either direction of monotonicity is accepted. When f has no sign change the
/// endpoint on the side of the missing crossing is returned with a flag.
RootResult bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-8);

/// Newton iteration kept inside a shrinking sign-change bracket, falling back
/// to bisection whenever the step leaves it. `fdf` returns (f, f').
RootResult newton_bracketed(const std::function<std::pair<double, double>(double)>& fdf, double lo,
                            double hi, double tol = 1e-10, double guess = std::numeric_limits<double>::quiet_NaN());

// ---------------------------------------------------------------------------
// H1(w1, w2, d1, d2, p) = int_1^l phi^{delta d2} Gamma(p+d+alpha) / (w1 + phi^delta w2 + beta)^{p+d+alpha} dphi

enum class H1Method {
  kQuadrature,      // Gauss-Legendre over phi (reference)
  kIncompleteBeta,  // closed form through I_x(d2+1, p+d1+alpha-1)
  kAuto,            // closed form where defined and well conditioned, else quadrature
};

/// Evaluates log H1 for one (d1, d2, delta) cell and a fixed prior, caching the
/// gamma-function constants. Cheap to copy.
class H1Evaluator {
 public:
  H1Evaluator(int failures1, int failures2, bool stress_raised, const PriorSpec& prior,
              H1Method method = H1Method::kAuto, int quad_order = 64);

  /// log H1 for p = 0, 1, ..., out.size()-1 (at most kMaxPower+1 values).
  void log_values(double w1, double w2, std::span<double> out) const;
  /// log H1 at a single non-negative real p.
  double log_value(double w1, double w2, double p) const;

  static constexpr int kMaxPower = 3;

 private:
  bool closed_form_ok() const;
  void log_quadrature(double w1, double w2, std::span<double> out) const;
  void log_incomplete_beta(double w1, double w2, std::span<double> out) const;

  int d1_, d2_;
  bool raised_;
  PriorSpec prior_;
  H1Method method_;
  int quad_order_;
  double log_width_;                                     // log(l - 1)
  std::array<double, kMaxPower + 1> log_gamma_s_{};      // log Gamma(p + d + alpha)
  std::array<double, kMaxPower + 1> beta_b_{};           // p + d1 + alpha - 1
  std::array<double, kMaxPower + 1> log_gamma_b_{};      // log Gamma(b_p)
  std::array<double, kMaxPower + 1> log_beta_ab_{};      // log B(d2 + 1, b_p)
};

/// log H1 at a single point (adaptive quadrature when `method` is kQuadrature).
double log_h1(double w1, double w2, int failures1, int failures2, double p, bool stress_raised,
              const PriorSpec& prior, H1Method method = H1Method::kQuadrature);
double h1(double w1, double w2, int failures1, int failures2, double p, bool stress_raised,
          const PriorSpec& prior, H1Method method = H1Method::kQuadrature);

/// Kahan-compensated accumulator for alternating sums.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double binomial(int n, int k);

}  // namespace bspaa::numerics
