#include <random>

#include <gtest/gtest.h>

#include "opcalc/operator.hpp"

using namespace opcalc;

namespace {

Rational random_rational(std::mt19937& rng, int span = 12, int den_max = 6) {
  std::uniform_int_distribution<int> n(-span, span), d(1, den_max);
  return Rational(BigInt(n(rng)), BigInt(d(rng)));
}

RampSum random_ramps(std::mt19937& rng) {
  std::uniform_int_distribution<int> count(1, 5), order(-2, 4);
  RampSum r;
  for (int i = 0, n = count(rng); i < n; ++i)
    r.add(ComplexRational(random_rational(rng), random_rational(rng)), order(rng), random_rational(rng));
  return r;
}

OperatorWord random_word(std::mt19937& rng) {
  std::uniform_int_distribution<int> count(1, 4), power(-3, 2);
  OperatorWord w;
  for (int i = 0, n = count(rng); i < n; ++i) w.add(ComplexRational(random_rational(rng)), random_rational(rng), power(rng));
  return w;
}

const ComplexRational half(Rational(1, 2));

}  // namespace

TEST(Decompose, SincFourier) {
  OperatorWord w = decompose(parse_expression("sinc(x)"), Variant::imaginary_fourier);
  OperatorWord want = OperatorWord::term(half, 1, -1) + OperatorWord::term(-half, -1, -1);
  EXPECT_EQ(w, want) << w.to_string();
}

TEST(Decompose, XExpLaplace) {
  OperatorWord w = decompose(parse_expression("x*exp(-x)"), Variant::real_laplace);
  EXPECT_EQ(w, OperatorWord::term(-1, 1, 1)) << w.to_string();
}

TEST(Decompose, ConstantIsIdentity) {
  EXPECT_EQ(decompose(parse_expression("1"), Variant::real_laplace), OperatorWord::identity());
  EXPECT_EQ(decompose(parse_expression("1"), Variant::imaginary_fourier), OperatorWord::identity());
}

TEST(Decompose, RejectsGaussianAndRationalFactors) {
  EXPECT_THROW(decompose(parse_expression("exp(-x^2/2)"), Variant::imaginary_fourier), UnsupportedFamily);
  EXPECT_THROW(decompose(parse_expression("1/(x^2+1)"), Variant::real_laplace), UnsupportedFamily);
  try {
    decompose(parse_expression("cos(x)/(1+x)"), Variant::real_laplace);
    FAIL();
  } catch (const UnsupportedFamily& e) {
    EXPECT_NE(std::string(e.what()).find("not exponential-polynomial"), std::string::npos);
  }
}

TEST(Decompose, ComplexTranslationRejected) {
  // cos(x) under the Laplace variant needs translation by +-i
  EXPECT_THROW(decompose(parse_expression("cos(x)"), Variant::real_laplace), UnsupportedFamily);
  // exp(-x) under the Fourier variant needs translation by i; it grows on R
  EXPECT_THROW(decompose(parse_expression("exp(-x)"), Variant::imaginary_fourier), UnsupportedFamily);
}

TEST(ApplyWord, SincOnDelta) {
  OperatorWord w = OperatorWord::term(half, 1, -1) + OperatorWord::term(-half, -1, -1);
  RampSum r = apply_word(w, RampSum::delta());
  RampSum want = RampSum::ramp(0, -1, half) + RampSum::ramp(0, 1, -half);
  EXPECT_EQ(r, want) << r.to_string();
}

TEST(ApplyWord, IdentityAndDoubleAntiderivative) {
  std::mt19937 rng(5);
  for (int i = 0; i < 50; ++i) {
    RampSum r = random_ramps(rng);
    EXPECT_EQ(apply_word(OperatorWord::identity(), r), r);
  }
  EXPECT_EQ(apply_word(OperatorWord::derivative(-2), RampSum::delta()), RampSum::ramp(1));
}

TEST(EvalLimit, Examples) {
  RampSum rect = RampSum::ramp(0, -1, half) + RampSum::ramp(0, 1, -half);
  EXPECT_EQ(eval_limit_at_zero(rect), ExactValue::rational(Rational(1, 2)));

  RampSum b2 = RampSum::ramp(1, Rational(-4, 3)) + RampSum::ramp(1, Rational(-2, 3), -1) +
               RampSum::ramp(1, Rational(2, 3), -1) + RampSum::ramp(1, Rational(4, 3));
  EXPECT_EQ(eval_limit_at_zero(b2), ExactValue::rational(Rational(2, 3)));
  EXPECT_EQ(eval_limit_at_zero(RampSum{}), ExactValue{});
}

TEST(EvalLimit, Errors) {
  EXPECT_THROW(eval_limit_at_zero(RampSum::delta()), DomainError);
  EXPECT_THROW(eval_limit_at_zero(RampSum::ramp(0)), DomainError);
  // a step at 0 that cancels is fine
  RampSum cancel = RampSum::ramp(0, 0, 1) + RampSum::ramp(0, 0, -1) + RampSum::ramp(1);
  EXPECT_EQ(eval_limit_at_zero(cancel), ExactValue{});
  try {
    eval_limit_at_zero(RampSum::ramp(0, 0, 3));
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("discontinuous"), std::string::npos);
  }
}

TEST(Perturb, ConstantCancelsUnderDifference) {
  OperatorWord diff = OperatorWord::translation(1) + OperatorWord::term(-1, -1, 0);
  RampSum theta = RampSum::ramp(0);
  RampSum plain = apply_word(diff, theta);
  RampSum perturbed = apply_word(diff, perturb_antiderivative(theta, 1, {ComplexRational(Rational(7, 3))}));
  EXPECT_EQ(plain, perturbed);
  EXPECT_EQ(perturb_antiderivative(theta, 1, {}), theta);
  EXPECT_EQ(perturb_antiderivative(theta, 1, {0, 0}), theta);
}

TEST(Perturb, SecondDifferenceKillsLinear) {
  OperatorWord diff = OperatorWord::translation(1) + OperatorWord::term(-1, -1, 0);
  OperatorWord diff2 = diff * diff;
  RampSum r2 = RampSum::ramp(2);
  EXPECT_EQ(apply_word(diff2, perturb_antiderivative(r2, 3, {3, 1})), apply_word(diff2, r2));
}

TEST(Perturb, DegreeMustBeBelowOrder) {
  EXPECT_THROW(perturb_antiderivative(RampSum::ramp(0), 1, {1, 1}), DomainError);
  EXPECT_THROW(perturb_antiderivative(RampSum::ramp(2), 3, {0, 0, 0, 1}), DomainError);
}

TEST(Properties, TranslationComposition) {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    RampSum r = random_ramps(rng);
    if (i % 3 == 0) r = perturb_antiderivative(r, 4, {random_rational(rng), random_rational(rng), random_rational(rng)});
    Rational a = random_rational(rng), b = random_rational(rng);
    EXPECT_EQ(apply_word(OperatorWord::translation(a), apply_word(OperatorWord::translation(b), r)),
              apply_word(OperatorWord::translation(a + b), r));
  }
}

TEST(Properties, DerivativeUndoesAntiderivative) {
  std::mt19937 rng(12);
  for (int i = 0; i < 200; ++i) {
    RampSum r = random_ramps(rng);
    if (i % 2) r = perturb_antiderivative(r, 3, {random_rational(rng), random_rational(rng)});
    EXPECT_EQ(apply_word(OperatorWord::derivative(1), apply_word(OperatorWord::derivative(-1), r)), r);
  }
}

TEST(Properties, Linearity) {
  std::mt19937 rng(13);
  for (int i = 0; i < 200; ++i) {
    RampSum a = random_ramps(rng), b = random_ramps(rng);
    OperatorWord w = random_word(rng);
    EXPECT_EQ(apply_word(w, a + b), apply_word(w, a) + apply_word(w, b));
  }
}

TEST(Properties, SincProductLimitsIgnorePerturbation) {
  // Products of sincs with rates summing below 1: limits at 0 are exact and
  // independent of the anti-derivative representative.
  std::mt19937 rng(14);
  for (int i = 0; i < 60; ++i) {
    std::uniform_int_distribution<int> count(0, 3), den(3, 20);
    std::string text = "sinc(x)";
    for (int k = 0, n = count(rng); k < n; ++k) text += "*sinc(x/" + std::to_string(den(rng)) + ")";
    OperatorWord w = decompose(parse_expression(text), Variant::imaginary_fourier);
    int depth = -w.min_power();
    RampSum base = apply_to_delta(w);
    std::vector<ComplexRational> p;
    for (int k = 0; k < depth; ++k) p.emplace_back(random_rational(rng), random_rational(rng));
    RampSum perturbed = apply_to_delta(w, p);
    EXPECT_EQ(base.limit_at(0), perturbed.limit_at(0)) << text;
    Rational y = random_rational(rng, 3, 7);
    try {
      EXPECT_EQ(base.limit_at(y), perturbed.limit_at(y)) << text << " at " << y;
    } catch (const DomainError&) {
      // y landed on a breakpoint
    }
  }
}

TEST(ExpPoly, EntireQuotients) {
  auto f = exp_poly_of(parse_expression("(exp(-x)-exp(-2*x))/x"));
  EXPECT_TRUE(f.is_entire());
  EXPECT_EQ(f.min_power(), -1);
  EXPECT_FALSE(exp_poly_of(parse_expression("exp(-x)/x")).is_entire());
  EXPECT_TRUE(exp_poly_of(parse_expression("sinc(x)^3")).is_entire());
  auto [re, im] = exp_poly_of(parse_expression("sinc(2*x)*cos(x)")).evaluate<double>(0.4);
  EXPECT_NEAR(re, std::sin(0.8) / 0.8 * std::cos(0.4), 1e-15);
  EXPECT_NEAR(im, 0, 1e-15);
}
