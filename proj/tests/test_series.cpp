#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "opcalc/oracle.hpp"
#include "opcalc/series.hpp"

using namespace opcalc;

namespace {

double re(const SeriesSum& s) { return s.value.re.convert_to<double>(); }
double im(const SeriesSum& s) { return s.value.im.convert_to<double>(); }

PowerSeries series(const char* text, std::size_t n = kDefaultTruncation) { return taylor_of(parse_expression(text), n); }

}  // namespace

TEST(TaylorOf, Examples) {
  auto e = series("exp(-x)", 3);
  ASSERT_EQ(e.coeffs.size(), 4u);
  EXPECT_EQ(e[0], ComplexRational(1));
  EXPECT_EQ(e[1], ComplexRational(-1));
  EXPECT_EQ(e[2], ComplexRational(Rational(1, 2)));
  EXPECT_EQ(e[3], ComplexRational(Rational(-1, 6)));

  auto s = series("sinc(x)", 4);
  std::vector<ComplexRational> want{1, 0, Rational(-1, 6), 0, Rational(1, 120)};
  EXPECT_EQ(s.coeffs, want);

  auto xe = series("x*exp(-x)", 2);
  std::vector<ComplexRational> want_xe{0, 1, -1};
  EXPECT_EQ(xe.coeffs, want_xe);
}

TEST(TaylorOf, RejectsPoles) {
  EXPECT_THROW(series("1/(x^2+1)"), UnsupportedFamily);
  EXPECT_THROW(series("1/x"), UnsupportedFamily);
  try {
    series("cos(x)/x");
  } catch (const UnsupportedFamily& e) {
    EXPECT_NE(std::string(e.what()).find("not series-representable"), std::string::npos);
  }
}

TEST(TaylorOf, RemovableQuotientsAreEntire) {
  auto f = series("(exp(-x)-exp(-2*x))/x", 3);
  // (e^{-x} - e^{-2x})/x = 1 - 3x/2 + 7x^2/6 - 5x^3/8
  std::vector<ComplexRational> want{1, Rational(-3, 2), Rational(7, 6), Rational(-5, 8)};
  EXPECT_EQ(f.coeffs, want);
}

TEST(TaylorOf, MatchesFiniteDifferencesOfClosedForm) {
  const char* corpus[] = {"exp(-x)*cos(2*x)", "sinc(x)^2", "x^3*exp(x/2)", "exp(-x^2/2)*sin(x)"};
  for (const char* text : corpus) {
    auto ast = parse_expression(text);
    auto s = taylor_of(ast, 40);
    // value and slope at small h from the series vs the evaluator
    for (double h : {0.1, -0.2, 0.3}) {
      double sum = 0, hp = 1;
      for (const auto& c : s.coeffs) {
        sum += c.re.to_double() * hp;
        hp *= h;
      }
      EXPECT_NEAR(sum, evaluate<double>(*ast, h), 1e-13) << text << " at " << h;
    }
  }
}

TEST(Majorant, Examples) {
  EXPECT_NEAR(majorant_abscissa(series("exp(-x)")).abscissa, 1.0, 0.1);
  EXPECT_EQ(majorant_abscissa(series("1")).abscissa, 0.0);
  EXPECT_NEAR(majorant_abscissa(series("exp(2*x)")).abscissa, 2.0, 0.2);
  auto m = majorant_abscissa(series("exp(-x)", 4));
  std::vector<Rational> want{1, 1, Rational(1, 2), Rational(1, 6), Rational(1, 24)};
  EXPECT_EQ(m.coeffs, want);
}

TEST(LaplaceLaurent, Examples) {
  auto f = series("exp(-x)");
  auto a = laplace_laurent(f, 2);
  EXPECT_EQ(a.verdict, Verdict::converged);
  EXPECT_NEAR(re(a), 1.0 / 3, 1e-12);
  EXPECT_EQ(laplace_laurent(f, Real(0.5)).verdict, Verdict::diverged);
  auto c = laplace_laurent(series("1"), 3);
  EXPECT_EQ(c.verdict, Verdict::converged);
  EXPECT_NEAR(re(c), 1.0 / 3, 1e-15);
  EXPECT_THROW(laplace_laurent(f, 0), DomainError);
  EXPECT_THROW(laplace_laurent(f, -1), DomainError);
}

TEST(LaplaceLaurent, DivergenceIsMonotoneInY) {
  const char* corpus[] = {"exp(-x)", "exp(-2*x)*cos(x)", "x*exp(-x)", "sinc(3*x)"};
  for (const char* text : corpus) {
    auto f = series(text);
    bool diverged_above = false;
    // scanning downward: once diverged, every smaller y diverges too
    for (double y = 6.0; y > 0.05; y -= 0.1) {
      bool d = laplace_laurent(f, Real(y)).verdict == Verdict::diverged;
      if (diverged_above) EXPECT_TRUE(d) << text << " y=" << y;
      diverged_above = diverged_above || d;
    }
    EXPECT_TRUE(diverged_above) << text;
  }
}

TEST(LaplaceLaurent, AgreesWithOracleWhenConverged) {
  const char* corpus[] = {"exp(-x)", "x*exp(-x)", "exp(-2*x)*cos(x)", "sinc(x)", "x^2*exp(-x/2)"};
  for (const char* text : corpus) {
    auto ast = parse_expression(text);
    auto f = taylor_of(ast);
    for (double y : {2.5, 4.0, 7.0}) {
      auto s = laplace_laurent(f, Real(y));
      if (s.verdict != Verdict::converged) continue;
      auto q = quad_half_line([&](long double x) { return evaluate<long double>(*ast, x) * std::exp(-x * y); }, 0, +1,
                              1e-13L);
      EXPECT_NEAR(re(s), static_cast<double>(q.value), 1e-8) << text << " y=" << y;
    }
  }
}

TEST(FiniteInterval, Examples) {
  auto a = finite_interval_transform(series("x^2"), 0, 1, 0, Kernel::none);
  EXPECT_NEAR(re(a), 1.0 / 3, 1e-15);
  auto b = finite_interval_transform(series("x*exp(-x)", 60), 0, 1, 0, Kernel::none);
  EXPECT_EQ(b.verdict, Verdict::converged);
  EXPECT_NEAR(re(b), 1 - 2 / std::exp(1.0), 1e-12);
  auto c = finite_interval_transform(series("1"), 0, real_pi(), 1, Kernel::fourier);
  EXPECT_NEAR(re(c), 0, 1e-12);
  EXPECT_NEAR(im(c), 2, 1e-12);
}

TEST(FiniteInterval, LaplaceKernel) {
  // int_0^1 e^{-x} e^{-xy} dx at y=1 through the real kernel with y -> -y: (e^{by} - e^{ay})/y
  auto s = finite_interval_transform(series("exp(-x)"), 0, 1, -1, Kernel::laplace);
  EXPECT_NEAR(re(s), (1 - std::exp(-2.0)) / 2, 1e-12);
}

TEST(FiniteInterval, AgreesWithTermwiseIntegration) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ab(-2, 2);
  auto f = series("x*exp(-x)", 60);
  for (int i = 0; i < 20; ++i) {
    double a = ab(rng), b = ab(rng);
    Rational ra = Rational::from_double(a, 6), rb = Rational::from_double(b, 6);
    auto s = finite_interval_transform(f, ra.to_real(), rb.to_real(), 0, Kernel::none);
    // exact term-wise sum with the same truncation
    Rational exact;
    for (std::size_t k = 0; k < f.coeffs.size(); ++k)
      exact += f.coeffs[k].re * (rb.pow(static_cast<long long>(k + 1)) - ra.pow(static_cast<long long>(k + 1))) /
               Rational(static_cast<long long>(k + 1));
    EXPECT_NEAR(re(s), exact.to_double(), 1e-14);
    // closed form -(b+1)e^{-b} + (a+1)e^{-a}
    double da = ra.to_double(), db = rb.to_double();
    EXPECT_NEAR(re(s), -(db + 1) * std::exp(-db) + (da + 1) * std::exp(-da), 1e-10);
  }
}

TEST(ConvergenceMonitor, Rules) {
  ConvergenceMonitor grow;
  bool stopped = false;
  for (int k = 0; k < 20 && !stopped; ++k) stopped = grow.add(Complex(Real(std::pow(2.0, k))));
  EXPECT_EQ(grow.verdict(), Verdict::diverged);

  ConvergenceMonitor geo(1e-12);
  stopped = false;
  for (int k = 0; k < 200 && !stopped; ++k) stopped = geo.add(Complex(Real(std::pow(0.5, k))));
  EXPECT_EQ(geo.verdict(), Verdict::converged);
  EXPECT_NEAR(geo.result().value.re.convert_to<double>(), 2.0, 1e-11);

  // transient mode tolerates early growth
  ConvergenceMonitor hump(1e-12, true);
  stopped = false;
  for (int k = 0; k < 400 && !stopped; ++k) stopped = hump.add(Complex(Real(std::pow(20.0, k) / std::tgamma(k + 1.0))));
  EXPECT_EQ(hump.verdict(), Verdict::converged);
}
