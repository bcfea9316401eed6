#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "opcalc/kernels.hpp"
#include "opcalc/oracle.hpp"

using namespace opcalc;

namespace {

// The closed form printed alongside the sinc^3 Gaussian integral:
// g = y e^{-y^2/2}/2 + (1 + y^2) S(y)/2 with S = sqrt(pi/2) erf(y/sqrt 2).
GaussianChain printed_g() { return GaussianChain{{0, Rational(1, 2)}, {Rational(1, 2), 0, Rational(1, 2)}, {}}; }

Rational horner(const std::vector<Rational>& c, const Rational& t) {
  Rational acc;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
  return acc;
}

}  // namespace

TEST(OneOverY, Examples) {
  EXPECT_EQ(one_over_y_chain(0), LogChain::monomial(1, -1));
  EXPECT_EQ(one_over_y_chain(1), LogChain::monomial(-1, -2));
  EXPECT_EQ(one_over_y_chain(-1), LogChain::monomial(1, 0, true));
  EXPECT_EQ(one_over_y_chain(-1).derivative(), one_over_y_chain(0));
}

TEST(OneOverY, DerivativeChainConsistency) {
  for (int n = -8; n <= 8; ++n) EXPECT_EQ(one_over_y_chain(n).derivative(), one_over_y_chain(n + 1)) << n;
}

TEST(OneOverY, ExactValuesAndLimits) {
  // second anti-derivative y ln y - y vanishes as y -> 0+ and is -1 at 1
  LogChain h2 = one_over_y_chain(-2);
  EXPECT_EQ(h2.limit_at_zero_plus(), ExactValue{});
  EXPECT_EQ(h2.exact_at(1), ExactValue::rational(-1));
  EXPECT_EQ(h2.exact_at(2), exact_log(2) * Rational(2) + ExactValue::rational(-2));
  EXPECT_THROW(one_over_y_chain(-1).limit_at_zero_plus(), DomainError);
  EXPECT_THROW(one_over_y_chain(0).exact_at(0), DomainError);
}

TEST(GaussianChain, Examples) {
  EXPECT_EQ(gaussian_chain(0), (GaussianChain{{1}, {}, {}}));
  EXPECT_EQ(gaussian_chain(1), (GaussianChain{{}, {1}, {}}));
  EXPECT_EQ(gaussian_chain(1).derivative(), gaussian_chain(0));
  EXPECT_NEAR(gaussian_chain(1).evaluate(1).convert_to<double>(), std::sqrt(M_PI / 2) * std::erf(1 / std::sqrt(2.0)),
              1e-15);
}

TEST(GaussianChain, DerivativeChainConsistency) {
  for (unsigned n = 1; n <= 10; ++n) EXPECT_EQ(gaussian_chain(n).derivative(), gaussian_chain(n - 1)) << n;
}

TEST(GaussianChain, DefiniteParity) {
  for (unsigned n = 0; n <= 8; ++n) {
    for (double y : {0.3, 1.7, 4.0}) {
      Real a = gaussian_chain(n).evaluate(y), b = gaussian_chain(n).evaluate(-y);
      Real expect = n % 2 ? -a : a;
      EXPECT_LT(boost::multiprecision::abs(b - expect), Real(1e-40)) << n;
    }
  }
}

TEST(GaussianChain, ThirdOrderMatchesPrintedClosedForm) {
  GaussianChain g = printed_g();
  EXPECT_EQ(g.derivative().derivative().derivative(), gaussian_chain(0));
  // central third difference of both representatives agrees at y = 0
  auto diff3 = [](const GaussianChain& c) {
    return c.evaluate(3) - 3 * c.evaluate(1) + 3 * c.evaluate(-1) - c.evaluate(-3);
  };
  EXPECT_LT(boost::multiprecision::abs(diff3(g) - diff3(gaussian_chain(3))), Real(1e-40));
}

TEST(GaussianChain, CentralDifferencesAnnihilateLowDegree) {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> c(-50, 50), d(1, 9);
  for (unsigned n = 1; n <= 8; ++n) {
    std::vector<Rational> p;
    for (unsigned k = 0; k < n; ++k) p.emplace_back(BigInt(c(rng)), BigInt(d(rng)));
    Rational y(BigInt(c(rng)), BigInt(d(rng)));
    Rational total;
    for (unsigned k = 0; k <= n; ++k) {
      Rational w = Rational(binomial(n, k));
      total += (k % 2 ? -w : w) * horner(p, y + Rational(static_cast<long long>(n) - 2 * static_cast<long long>(k)));
    }
    EXPECT_TRUE(total.is_zero()) << n;
  }
}

TEST(Green, Examples) {
  auto g1 = green_function(1).terms();
  ASSERT_EQ(g1.size(), 1u);
  EXPECT_EQ(g1[0].coeff, ComplexRational(Rational(1, 2)));
  EXPECT_EQ(g1[0].rate, Rational(1));
  EXPECT_EQ(g1[0].shift, Rational(0));
  EXPECT_EQ(green_function(2).exact_at(0), ExactValue::rational(Rational(1, 4)));
  EXPECT_THROW(green_function(0), DomainError);
  EXPECT_THROW(green_function(-1), DomainError);
}

TEST(Green, SolvesOperatorAwayFromZeroWithUnitSlopeJump) {
  PiecewiseExp g = green_function(3);
  for (double y : {-1.3, -0.2, 0.4, 2.0}) {
    Complex lhs = g.derivative_at(y, 2) * Real(-1) + g.derivative_at(y, 0) * Real(9);
    EXPECT_LT(lhs.abs(), Real(1e-40)) << y;
  }
  Complex jump = g.derivative_at(0, 1, true) - g.derivative_at(0, 1, false);
  EXPECT_LT((jump - Complex(Real(-1))).abs(), Real(1e-40));
}

TEST(Green, BumpPairingRecoversPointValue) {
  // int G (-phi'' + a^2 phi) = phi(0) for a bump phi of width w
  for (double a : {1.0, 2.0, 3.0}) {
    for (double w : {1e-2, 5e-3}) {
      auto bump = [w](long double y, int order) -> long double {
        long double t = y / w;
        if (std::fabs(t) >= 1) return 0;
        long double s = 1 - t * t, b = std::exp(-1 / s);
        if (order == 0) return b;
        long double d1 = -2 * t / (s * s);
        long double d2 = -2 / (s * s) - 8 * t * t / (s * s * s);
        return b * (d1 * d1 + d2) / (w * w);
      };
      auto integrand = [&](long double y) {
        long double gy = std::exp(-a * std::fabs(y)) / (2 * a);
        return gy * (-bump(y, 2) + a * a * bump(y, 0));
      };
      long double left = quad_interval(integrand, -w, 0, 1e-13L).value;
      long double right = quad_interval(integrand, 0, w, 1e-13L).value;
      EXPECT_NEAR(static_cast<double>(left + right), std::exp(-1.0), 1e-6) << a << " " << w;
    }
  }
}

TEST(EvalKernel, Examples) {
  EXPECT_NEAR(eval_kernel(one_over_y_chain(-1), 2).convert_to<double>(), 0.6931471805599453, 1e-16);
  EXPECT_NEAR(eval_kernel(green_function(1), 1).convert_to<double>(), 0.18393972058572117, 1e-16);
  EXPECT_EQ(eval_kernel(gaussian_chain(0), 0), Real(1));
  EXPECT_THROW(eval_kernel(one_over_y_chain(-1), 0), DomainError);
  EXPECT_THROW(eval_kernel(one_over_y_chain(-1), -1), DomainError);
  EXPECT_THROW(eval_kernel(gaussian_chain(0), 0, 0), DomainError);
  EXPECT_THROW(eval_kernel(gaussian_chain(0), 0, 200), DomainError);
}

TEST(Erf, HighPrecisionReferenceValues) {
  const std::pair<const char*, const char*> table[] = {
      {"0.5", "0.52049987781304653768274665389196452873645157575796"},
      {"1", "0.8427007929497148693412206350826092592960669979663"},
      {"2.5", "0.99959304798255504106043578426002508727965132259629"},
      {"3", "0.9999779095030014145586272238704176796201522929126"},
      {"4", "0.99999998458274209971998114784032651311595142785475"},
      {"6", "0.99999999999999997848026328750108688340664960081262"},
  };
  for (const auto& [x, want] : table) {
    Real got = opcalc::erf(Real(x));
    EXPECT_LT(boost::multiprecision::abs(got - Real(want)), Real(1e-45)) << x;
    EXPECT_LT(boost::multiprecision::abs(opcalc::erf(-Real(x)) + Real(want)), Real(1e-45)) << x;
  }
  EXPECT_EQ(opcalc::erf(Real(0)), Real(0));
}
