#include "bspaa/numerics.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bspaa/errors.hpp"

namespace bspaa::numerics {

const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

// ---------------------------------------------------------------------------

double log_gamma(double x) {
  static constexpr double kCoef[14] = {
      57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,
      -0.491913816097620199,   .339946499848118887e-4,  .465236289270485756e-4,
      -.983744753048795646e-4, .158088703224912494e-3,  -.210264441724104883e-3,
      .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
      -.261908384015814087e-4, .368991826595316234e-5};
  if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be > 0");
  double y = x;
  double tmp = x + 5.24218750000000000;  // 671/128
  tmp = (x + 0.5) * std::log(tmp) - tmp;
  double ser = 0.999999999999997092;
  for (double c : kCoef) ser += c / ++y;
  return tmp + std::log(2.5066282746310005 * ser / x);
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 20000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) return h;
  }
  throw ConvergenceError("incomplete beta continued fraction did not converge");
}

}  // namespace

BetaTails inc_beta_tails(double x, double one_minus_x, double a, double b, double log_beta_ab) {
  if (x <= 0.0) return {0.0, 1.0};
  if (one_minus_x <= 0.0) return {1.0, 0.0};
  const double log_front = a * std::log(x) + b * std::log(one_minus_x) - log_beta_ab;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double lower = std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
    return {lower, 1.0 - lower};
  }
  const double upper = std::exp(log_front) * beta_continued_fraction(b, a, one_minus_x) / b;
  return {1.0 - upper, upper};
}

double reg_inc_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("reg_inc_beta: a and b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("reg_inc_beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return inc_beta_tails(x, 1.0 - x, a, b, log_beta(a, b)).lower;
}

double reg_lower_gamma(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("reg_lower_gamma: a must be > 0");
  if (!(x >= 0.0)) throw std::domain_error("reg_lower_gamma: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double log_front = -x + a * std::log(x) - log_gamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < 100000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * kEps) return sum * std::exp(log_front);
    }
    throw ConvergenceError("lower incomplete gamma series did not converge");
  }
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) return 1.0 - std::exp(log_front) * h;
  }
  throw ConvergenceError("upper incomplete gamma fraction did not converge");
}

double uniform_sum_density(double x, int count, double width) {
  if (count < 1) throw std::invalid_argument("uniform_sum_density: count must be >= 1");
  if (!(width > 0.0)) throw std::invalid_argument("uniform_sum_density: width must be > 0");
  const double u = x / width;
  if (!(u > 0.0) || !(u < count)) return 0.0;
  // basis[j] holds M_r(u - j) for the current order r.
  std::array<double, 64> fixed{};
  std::vector<double> heap;
  double* basis = fixed.data();
  if (count + 1 > static_cast<int>(fixed.size())) {
    heap.assign(static_cast<std::size_t>(count) + 1, 0.0);
    basis = heap.data();
  }
  for (int j = 0; j <= count; ++j) {
    const double v = u - j;
    basis[j] = (v >= 0.0 && v < 1.0) ? 1.0 : 0.0;
  }
  for (int r = 2; r <= count; ++r) {
    for (int j = 0; j + 1 <= count; ++j) {
      const double v = u - j;
      basis[j] = (v * basis[j] + (r - v) * basis[j + 1]) / (r - 1);
    }
  }
  return basis[0] / width;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

// ---------------------------------------------------------------------------

namespace {

QuadratureRule build_gauss_legendre(int order) {
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      dp = order * (z * p1 - p2) / (z * z - 1.0);
      const double z_prev = z;
      z = z_prev - p1 / dp;
      if (std::abs(z - z_prev) <= 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -z;
    rule.nodes[static_cast<std::size_t>(order - 1 - i)] = z;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(order - 1 - i)] = w;
  }
  if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int order) {
  if (order < 1 || order > 4096) throw std::invalid_argument("gauss_legendre: order must be in [1, 4096]");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<QuadratureRule>(build_gauss_legendre(order));
  return *slot;
}

// ---------------------------------------------------------------------------

RootResult bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo <= hi)) throw std::invalid_argument("bisect: lo must not exceed hi");
  const double flo = f(lo);
  const double fhi = f(hi);
  RootResult r;
  if (flo == 0.0) return {lo, Bracket::kCrossing, 0};
  if (fhi == 0.0) return {hi, Bracket::kCrossing, 0};
  if (flo < 0.0 && fhi < 0.0) return {lo, Bracket::kNoCrossingBelow, 0};
  if (flo > 0.0 && fhi > 0.0) return {hi, Bracket::kNoCrossingAbove, 0};
  const bool lo_negative = flo < 0.0;
  double a = lo;
  double b = hi;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double fm = f(mid);
    ++r.iterations;
    if (fm == 0.0) {
      a = b = mid;
      break;
    }
    if ((fm < 0.0) == lo_negative) {
      a = mid;
    } else {
      b = mid;
    }
  }
  r.root = 0.5 * (a + b);
  r.status = Bracket::kCrossing;
  return r;
}

RootResult newton_bracketed(const std::function<std::pair<double, double>(double)>& fdf, double lo,
                            double hi, double tol, double guess) {
  if (!(lo <= hi)) throw std::invalid_argument("newton_bracketed: lo must not exceed hi");
  const double flo = fdf(lo).first;
  const double fhi = fdf(hi).first;
  if (flo == 0.0) return {lo, Bracket::kCrossing, 0};
  if (fhi == 0.0) return {hi, Bracket::kCrossing, 0};
  if (flo < 0.0 && fhi < 0.0) return {lo, Bracket::kNoCrossingBelow, 0};
  if (flo > 0.0 && fhi > 0.0) return {hi, Bracket::kNoCrossingAbove, 0};
  // Orient so that f(neg) < 0 < f(pos).
  double neg = flo < 0.0 ? lo : hi;
  double pos = flo < 0.0 ? hi : lo;
  double x = (std::isfinite(guess) && guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
  RootResult r;
  for (int it = 0; it < 200; ++it) {
    ++r.iterations;
    const auto [fx, dfx] = fdf(x);
    if (fx == 0.0) return {x, Bracket::kCrossing, r.iterations};
    if (fx < 0.0) {
      neg = x;
    } else {
      pos = x;
    }
    double next = (dfx != 0.0 && std::isfinite(dfx)) ? x - fx / dfx : std::numeric_limits<double>::quiet_NaN();
    const double a = std::min(neg, pos);
    const double b = std::max(neg, pos);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    const double step = std::abs(next - x);
    x = next;
    if (step <= tol || b - a <= tol) {
      r.root = x;
      return r;
    }
  }
  r.root = x;
  return r;
}

// ---------------------------------------------------------------------------

namespace {

// log of J(s) = int_1^l phi^{d2} (A + phi w2)^{-s} dphi by a fixed rule,
// accumulated in log space.
void log_j_quadrature(double A, double w2, int d2, double l, std::span<const double> s,
                      std::span<double> out, int order) {
  const QuadratureRule& rule = gauss_legendre(order);
  const double half = 0.5 * (l - 1.0);
  const double mid = 0.5 * (l + 1.0);
  const std::size_t np = s.size();
  std::array<double, H1Evaluator::kMaxPower + 1> peak;
  std::array<double, H1Evaluator::kMaxPower + 1> acc;
  peak.fill(-std::numeric_limits<double>::infinity());
  acc.fill(0.0);
  for (int i = 0; i < rule.order(); ++i) {
    const double phi = mid + half * rule.nodes[static_cast<std::size_t>(i)];
    const double lw = std::log(rule.weights[static_cast<std::size_t>(i)]);
    const double lphi = d2 * std::log(phi);
    const double lden = std::log(A + phi * w2);
    for (std::size_t p = 0; p < np; ++p) {
      const double g = lw + lphi - s[p] * lden;
      if (g > peak[p]) {
        acc[p] = acc[p] * std::exp(peak[p] - g) + 1.0;
        peak[p] = g;
      } else {
        acc[p] += std::exp(g - peak[p]);
      }
    }
  }
  for (std::size_t p = 0; p < np; ++p) out[p] = std::log(half) + peak[p] + std::log(acc[p]);
}

double log_j_quadrature_one(double A, double w2, int d2, double l, double s, int order) {
  double out = 0.0;
  const double sv[1] = {s};
  log_j_quadrature(A, w2, d2, l, sv, std::span<double>(&out, 1), order);
  return out;
}

// Closed form of log J through the incomplete beta with a = d2 + 1 and
// b = s - d2 - 1; returns NaN when the difference of tails underflows.
double log_j_incomplete_beta(double A, double w2, int d2, double l, double b, double log_beta_ab) {
  const double a = d2 + 1.0;
  const double z1 = w2 / (A + w2);
  const double y1 = A / (A + w2);
  const double zl = l * w2 / (A + l * w2);
  const double yl = A / (A + l * w2);
  const BetaTails t1 = inc_beta_tails(z1, y1, a, b, log_beta_ab);
  const BetaTails tl = inc_beta_tails(zl, yl, a, b, log_beta_ab);
  const double diff = z1 >= 0.5 ? t1.upper - tl.upper : tl.lower - t1.lower;
  if (!(diff > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return log_beta_ab - b * std::log(A) - a * std::log(w2) + std::log(diff);
}

void check_exposures(double w1, double w2) {
  if (!(w1 >= 0.0) || !(w2 >= 0.0) || !std::isfinite(w1) || !std::isfinite(w2)) {
    throw std::domain_error("H1: exposures must be finite and >= 0");
  }
}

}  // namespace

H1Evaluator::H1Evaluator(int failures1, int failures2, bool stress_raised, const PriorSpec& prior,
                         H1Method method, int quad_order)
    : d1_(failures1),
      d2_(failures2),
      raised_(stress_raised),
      prior_(prior),
      method_(method),
      quad_order_(quad_order) {
  if (failures1 < 0 || failures2 < 0) throw std::domain_error("H1: failure counts must be >= 0");
  prior.validate();
  log_width_ = std::log(prior.accel_upper - 1.0);
  const int d = d1_ + d2_;
  for (int p = 0; p <= kMaxPower; ++p) {
    log_gamma_s_[p] = log_gamma(p + d + prior.shape);
    beta_b_[p] = p + d1_ + prior.shape - 1.0;
    if (beta_b_[p] > 0.0) {
      log_gamma_b_[p] = log_gamma(beta_b_[p]);
      log_beta_ab_[p] = log_gamma(d2_ + 1.0) + log_gamma_b_[p] - log_gamma_s_[p];
    }
  }
  if (method_ == H1Method::kIncompleteBeta && raised_ && !(beta_b_[0] > 0.0)) {
    throw std::domain_error("H1: incomplete-beta form needs d1 + alpha > 1");
  }
}

bool H1Evaluator::closed_form_ok() const {
  if (method_ == H1Method::kQuadrature) return false;
  if (!(beta_b_[0] > 0.0)) return false;
  if (method_ == H1Method::kAuto && prior_.accel_upper - 1.0 < 1e-2) return false;
  return true;
}

void H1Evaluator::log_values(double w1, double w2, std::span<double> out) const {
  check_exposures(w1, w2);
  if (out.size() > static_cast<std::size_t>(kMaxPower + 1)) throw std::invalid_argument("H1: too many powers");
  const double A = w1 + prior_.rate;
  const double l = prior_.accel_upper;
  const int d = d1_ + d2_;
  if (!raised_) {
    const double lden = std::log(A + w2);
    for (std::size_t p = 0; p < out.size(); ++p) {
      out[p] = log_gamma_s_[p] + log_width_ - (p + d + prior_.shape) * lden;
    }
    return;
  }
  if (w2 == 0.0) {
    const double lspan = std::log((std::pow(l, d2_ + 1.0) - 1.0) / (d2_ + 1.0));
    const double lden = std::log(A);
    for (std::size_t p = 0; p < out.size(); ++p) {
      out[p] = log_gamma_s_[p] + lspan - (p + d + prior_.shape) * lden;
    }
    return;
  }
  if (closed_form_ok()) {
    log_incomplete_beta(w1, w2, out);
  } else {
    log_quadrature(w1, w2, out);
  }
}

void H1Evaluator::log_quadrature(double w1, double w2, std::span<double> out) const {
  const double A = w1 + prior_.rate;
  const int d = d1_ + d2_;
  std::array<double, kMaxPower + 1> s{};
  for (std::size_t p = 0; p < out.size(); ++p) s[p] = p + d + prior_.shape;
  log_j_quadrature(A, w2, d2_, prior_.accel_upper, std::span<const double>(s.data(), out.size()), out,
                   quad_order_);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] += log_gamma_s_[p];
}

void H1Evaluator::log_incomplete_beta(double w1, double w2, std::span<double> out) const {
  const double A = w1 + prior_.rate;
  for (std::size_t p = 0; p < out.size(); ++p) {
    const double lj = log_j_incomplete_beta(A, w2, d2_, prior_.accel_upper, beta_b_[p], log_beta_ab_[p]);
    if (std::isnan(lj)) {
      const double s = p + d1_ + d2_ + prior_.shape;
      out[p] = log_gamma_s_[p] + log_j_quadrature_one(A, w2, d2_, prior_.accel_upper, s, quad_order_);
    } else {
      out[p] = log_gamma_s_[p] + lj;
    }
  }
}

double H1Evaluator::log_value(double w1, double w2, double p) const {
  return log_h1(w1, w2, d1_, d2_, p, raised_, prior_, method_);
}

double log_h1(double w1, double w2, int failures1, int failures2, double p, bool stress_raised,
              const PriorSpec& prior, H1Method method) {
  check_exposures(w1, w2);
  if (!(p >= 0.0)) throw std::domain_error("H1: p must be >= 0");
  if (failures1 < 0 || failures2 < 0) throw std::domain_error("H1: failure counts must be >= 0");
  prior.validate();
  const double s = p + failures1 + failures2 + prior.shape;
  const double lgs = log_gamma(s);
  const double A = w1 + prior.rate;
  const double l = prior.accel_upper;
  if (!stress_raised) return lgs + std::log(l - 1.0) - s * std::log(A + w2);
  if (w2 == 0.0) {
    return lgs + std::log((std::pow(l, failures2 + 1.0) - 1.0) / (failures2 + 1.0)) - s * std::log(A);
  }
  const double b = s - failures2 - 1.0;
  const bool closed = method != H1Method::kQuadrature && b > 0.0 &&
                      !(method == H1Method::kAuto && l - 1.0 < 1e-2);
  if (method == H1Method::kIncompleteBeta && !(b > 0.0)) {
    throw std::domain_error("H1: incomplete-beta form needs p + d1 + alpha > 1");
  }
  if (closed) {
    const double lj = log_j_incomplete_beta(A, w2, failures2, l, b, log_beta(failures2 + 1.0, b));
    if (!std::isnan(lj)) return lgs + lj;
  }
  // Reference path: double the order until the log value settles.
  const Tolerances& tol = default_tolerances();
  int order = tol.h1_order;
  double prev = log_j_quadrature_one(A, w2, failures2, l, s, order);
  while (order * 2 <= tol.quadrature_max_order) {
    order *= 2;
    const double cur = log_j_quadrature_one(A, w2, failures2, l, s, order);
    if (std::abs(cur - prev) <= tol.h1_rel_tol * std::max(1.0, std::abs(cur))) return lgs + cur;
    prev = cur;
  }
  return lgs + prev;
}

double h1(double w1, double w2, int failures1, int failures2, double p, bool stress_raised,
          const PriorSpec& prior, H1Method method) {
  return std::exp(log_h1(w1, w2, failures1, failures2, p, stress_raised, prior, method));
}

}  // namespace bspaa::numerics
