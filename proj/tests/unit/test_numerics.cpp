#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "bspaa/numerics.hpp"
#include "oracles.hpp"

namespace nm = bspaa::numerics;

TEST(LogGamma, MatchesStd) {
  for (double x : {1e-3, 0.1, 0.5, 1.0, 1.5, 2.0, 3.7, 10.0, 33.3, 171.0, 1e4}) {
    EXPECT_NEAR(nm::log_gamma(x), std::lgamma(x), 1e-12 * std::max(1.0, std::abs(std::lgamma(x)))) << x;
  }
}

TEST(LogBeta, MatchesBoost) {
  for (double a : {0.5, 1.0, 3.0, 12.5})
    for (double b : {0.7, 2.0, 40.0})
      EXPECT_NEAR(nm::log_beta(a, b), std::log(boost::math::beta(a, b)), 1e-11);
}

TEST(RegIncBeta, MatchesBoostAcrossRegimes) {
  for (double a : {1.0, 2.0, 5.0, 31.0})
    for (double b : {0.3, 1.0, 4.3, 60.0})
      for (double x : {1e-6, 0.01, 0.2, 0.5, 0.77, 0.999}) {
        const double ref = boost::math::ibeta(a, b, x);
        EXPECT_NEAR(nm::reg_inc_beta(x, a, b), ref, 1e-12 + 1e-10 * ref) << a << ' ' << b << ' ' << x;
      }
}

TEST(RegIncBeta, EndpointsAndSymmetry) {
  EXPECT_EQ(nm::reg_inc_beta(0.0, 2.0, 3.0), 0.0);
  EXPECT_EQ(nm::reg_inc_beta(1.0, 2.0, 3.0), 1.0);
  EXPECT_NEAR(nm::reg_inc_beta(0.3, 2.5, 4.0) + nm::reg_inc_beta(0.7, 4.0, 2.5), 1.0, 1e-14);
}

TEST(IncBetaTails, UpperTailKeepsRelativeAccuracy) {
  const double a = 3.0, b = 20.0, x = 0.9;
  const auto t = nm::inc_beta_tails(x, 1.0 - x, a, b, nm::log_beta(a, b));
  const double ref = boost::math::ibetac(a, b, x);
  EXPECT_NEAR(t.upper / ref, 1.0, 1e-10);
}

TEST(RegLowerGamma, MatchesBoost) {
  for (double a : {0.5, 1.0, 3.0, 17.5})
    for (double x : {0.01, 0.9, 3.0, 25.0}) EXPECT_NEAR(nm::reg_lower_gamma(a, x), boost::math::gamma_p(a, x), 1e-12);
}

namespace {
// Irwin-Hall density by the alternating sum.
double irwin_hall(double x, int k, double width) {
  const double u = x / width;
  double s = 0.0;
  for (int j = 0; j <= k; ++j) {
    if (u - j <= 0) break;
    s += ((j % 2) ? -1.0 : 1.0) * boost::math::binomial_coefficient<double>(k, j) * std::pow(u - j, k - 1);
  }
  return s / boost::math::factorial<double>(k - 1) / width;
}
}  // namespace

TEST(UniformSumDensity, AgreesWithAlternatingSum) {
  for (int k = 1; k <= 8; ++k)
    for (double x : {0.05, 0.31, 0.5, 1.0, 1.7, 2.2, 3.9}) {
      const double width = 0.7;
      if (x >= k * width) continue;
      EXPECT_NEAR(nm::uniform_sum_density(x, k, width), irwin_hall(x, k, width), 1e-11) << k << ' ' << x;
    }
}

TEST(UniformSumDensity, IntegratesToOneAndVanishesOutside) {
  for (int k = 1; k <= 12; ++k) {
    const double width = 1.3;
    const double total = oracle::gk([&](double x) { return nm::uniform_sum_density(x, k, width); }, 0.0, k * width);
    EXPECT_NEAR(total, 1.0, 1e-9) << k;
    EXPECT_EQ(nm::uniform_sum_density(-0.1, k, width), 0.0);
    EXPECT_EQ(nm::uniform_sum_density(k * width + 0.1, k, width), 0.0);
  }
}

TEST(GaussLegendre, ExactForPolynomials) {
  for (int order : {2, 5, 16, 64}) {
    const auto& rule = nm::gauss_legendre(order);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    EXPECT_NEAR(wsum, 2.0, 1e-13);
    const int deg = 2 * order - 1;
    const double v = nm::integrate([&](double x) { return std::pow(x, deg - 1); }, 0.0, 1.0, rule);
    EXPECT_NEAR(v, 1.0 / deg, 1e-13);
  }
}

TEST(GaussLegendre, AdaptiveReportsConvergence) {
  const auto r = nm::integrate_adaptive([](double x) { return std::exp(-x); }, 0.0, 5.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, -std::expm1(-5.0), 1e-13);
}

TEST(Roots, BisectFlagsMissingCrossing) {
  const auto up = [](double x) { return x - 2.0; };
  EXPECT_NEAR(nm::bisect(up, 0.0, 5.0, 1e-12).root, 2.0, 1e-11);
  const auto r = nm::bisect(up, 3.0, 5.0);
  EXPECT_EQ(r.status, nm::Bracket::kNoCrossingAbove);
  EXPECT_EQ(r.root, 5.0);
  const auto down = [](double x) { return 1.0 - x; };
  EXPECT_NEAR(nm::bisect(down, 0.0, 4.0, 1e-12).root, 1.0, 1e-11);
}

TEST(Roots, NewtonBracketed) {
  const auto fdf = [](double x) { return std::make_pair(std::exp(x) - 3.0, std::exp(x)); };
  const auto r = nm::newton_bracketed(fdf, 0.0, 5.0, 1e-14);
  EXPECT_EQ(r.status, nm::Bracket::kCrossing);
  EXPECT_NEAR(r.root, std::log(3.0), 1e-12);
}

TEST(Binomial, SmallValues) {
  EXPECT_EQ(nm::binomial(30, 15), 155117520.0);
  EXPECT_EQ(nm::binomial(5, 0), 1.0);
  EXPECT_EQ(nm::binomial(5, 6), 0.0);
}

struct H1Case {
  double w1, w2;
  int d1, d2;
  bool raised;
  bspaa::PriorSpec prior;
};

class H1ClosedForm : public ::testing::TestWithParam<H1Case> {};

TEST_P(H1ClosedForm, AgreesWithDirectIntegral) {
  const H1Case c = GetParam();
  for (double p : {0.0, 1.0, 2.0}) {
    const double ref = oracle::h1_direct(c.w1, c.w2, c.d1, c.d2, p, c.raised, c.prior);
    for (auto method : {nm::H1Method::kIncompleteBeta, nm::H1Method::kAuto, nm::H1Method::kQuadrature}) {
      if (method == nm::H1Method::kIncompleteBeta && !c.raised) continue;
      const double got = nm::h1(c.w1, c.w2, c.d1, c.d2, p, c.raised, c.prior, method);
      EXPECT_NEAR(got / ref, 1.0, 1e-6) << "p=" << p << " method=" << static_cast<int>(method);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(
    Cells, H1ClosedForm,
    ::testing::Values(H1Case{65.07, 12.88, 1, 2, true, {1.3, 100, 30}}, H1Case{73.16, 17.97, 0, 4, true, {1.3, 100, 30}},
                      H1Case{0.5, 0.1, 1, 1, true, {3, 1, 10}}, H1Case{0.3, 0.02, 2, 0, true, {3, 1, 10}},
                      H1Case{0.6, 0.2, 2, 1, false, {3, 1, 10}}, H1Case{0.01, 1e-4, 0, 3, true, {2, 0.8, 10}},
                      H1Case{5.0, 9.0, 3, 5, true, {3.5, 1.2, 10}}, H1Case{0.4, 0.0, 1, 0, true, {3, 1, 10}}));

TEST(H1, DerivativeIdentity) {
  // dH1(p)/dw1 = -H1(p+1)
  const bspaa::PriorSpec prior{3, 1, 10};
  const double w1 = 0.7, w2 = 0.3, eps = 1e-5;
  const double num = (nm::h1(w1 + eps, w2, 1, 2, 0, true, prior) - nm::h1(w1 - eps, w2, 1, 2, 0, true, prior)) / (2 * eps);
  EXPECT_NEAR(num / -nm::h1(w1, w2, 1, 2, 1, true, prior), 1.0, 1e-7);
}
