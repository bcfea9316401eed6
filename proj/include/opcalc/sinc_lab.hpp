#pragma once

// Sign-tuple machinery for sinc products: Borwein integrals, their deficit,
// the sinc/cos product theorem, and sinc^n against a Gaussian.

#include <string>
#include <vector>

#include "opcalc/error.hpp"
#include "opcalc/exact.hpp"
#include "opcalc/kernels.hpp"
#include "opcalc/operator.hpp"
#include "opcalc/result.hpp"

namespace opcalc {

inline constexpr std::size_t kMaxTupleLength = 24;

struct SignTuple {
  std::vector<int> entries;  // each +1 or -1

  /// Product of the first `designated` entries (all of them by default).
  int sign(std::size_t designated = static_cast<std::size_t>(-1)) const {
    int s = 1;
    for (std::size_t i = 0; i < entries.size() && i < designated; ++i) s *= entries[i];
    return s;
  }
  SignTuple negated() const {
    SignTuple t = *this;
    for (int& e : t.entries) e = -e;
    return t;
  }
};

inline Rational beta_of(const SignTuple& gamma, const std::vector<Rational>& rates) {
  if (gamma.entries.size() != rates.size())
    throw DomainError("sign tuple has " + std::to_string(gamma.entries.size()) + " entries but there are " +
                      std::to_string(rates.size()) + " rates");
  Rational b;
  for (std::size_t i = 0; i < rates.size(); ++i) b += gamma.entries[i] > 0 ? rates[i] : -rates[i];
  return b;
}

inline std::vector<Rational> borwein_rates(unsigned n) {
  std::vector<Rational> r;
  for (unsigned k = 1; k <= n; ++k) r.emplace_back(1, 2 * k - 1);
  return r;
}

namespace detail {

inline void check_tuple_length(std::size_t n) {
  if (n > kMaxTupleLength)
    throw DomainError("tuple enumeration capped at " + std::to_string(kMaxTupleLength) + " entries, got " +
                      std::to_string(n));
}

inline BigInt lcm_of_denominators(const std::vector<Rational>& rates) {
  BigInt l = 1;
  for (const auto& r : rates) l = boost::multiprecision::lcm(l, r.denominator());
  return l;
}

/// Visits every tuple in Gray-code order with `first_fixed` entries pinned to
/// +1. The callback receives (beta * L as an integer, sign of the designated
/// prefix).
template <class F>
void enumerate_scaled(const std::vector<Rational>& rates, std::size_t designated, std::size_t first_fixed,
                      const BigInt& scale, F&& visit) {
  std::size_t n = rates.size();
  check_tuple_length(n);
  std::vector<BigInt> step(n);
  BigInt beta = 0;
  for (std::size_t i = 0; i < n; ++i) {
    BigInt v = rates[i].numerator() * (scale / rates[i].denominator());
    step[i] = 2 * v;
    beta += v;
  }
  std::vector<int> gamma(n, 1);
  int sign = 1;
  std::size_t free_bits = n - first_fixed;
  std::uint64_t count = std::uint64_t{1} << free_bits;
  visit(beta, sign);
  for (std::uint64_t g = 1; g < count; ++g) {
    std::size_t bit = static_cast<std::size_t>(__builtin_ctzll(g));
    std::size_t i = first_fixed + bit;
    if (gamma[i] > 0) beta -= step[i];
    else beta += step[i];
    gamma[i] = -gamma[i];
    if (i < designated) sign = -sign;
    visit(beta, sign);
  }
}

}  // namespace detail

/// B_n = int prod_{k<=n} sinc(x/(2k-1)) dx, by full enumeration over all
/// 2^n sign tuples with exact ramps.
inline ExactValue borwein_exact(unsigned n) {
  if (n == 0) throw DomainError("borwein_exact expects n >= 1");
  auto rates = borwein_rates(n);
  BigInt L = detail::lcm_of_denominators(rates);
  BigInt sum = 0;
  unsigned p = n - 1;
  detail::enumerate_scaled(rates, n, 0, L, [&](const BigInt& beta, int sign) {
    if (beta > 0 || (p == 0 && beta == 0)) {
      BigInt t = boost::multiprecision::pow(beta, p);
      if (sign > 0) sum += t;
      else sum -= t;
    }
  });
  Rational c = Rational(double_factorial(2 * n - 1)) /
               (Rational(BigInt(1) << (n - 1)) * Rational(factorial(p)) * Rational(boost::multiprecision::pow(L, p)));
  return ExactValue::pi_multiple(c * Rational(sum));
}

/// Same value from the 2^(n-1) tuples with gamma_1 = +1, pairing each tuple
/// with its negation: R(beta) + (-1)^n R(-beta).
inline ExactValue borwein_half_tuple(unsigned n) {
  if (n == 0) throw DomainError("borwein_half_tuple expects n >= 1");
  auto rates = borwein_rates(n);
  BigInt L = detail::lcm_of_denominators(rates);
  BigInt sum = 0;
  unsigned p = n - 1;
  detail::enumerate_scaled(rates, n, 1, L, [&](const BigInt& beta, int sign) {
    if (beta == 0) return;
    BigInt t = boost::multiprecision::pow(boost::multiprecision::abs(beta), p);
    // R_{n-1}(beta) + (-1)^n R_{n-1}(-beta): only the positive argument survives.
    int s = beta > 0 ? sign : (n % 2 ? -sign : sign);
    if (s > 0) sum += t;
    else sum -= t;
  });
  Rational c = Rational(double_factorial(2 * n - 1)) /
               (Rational(BigInt(1) << (n - 1)) * Rational(factorial(p)) * Rational(boost::multiprecision::pow(L, p)));
  return ExactValue::pi_multiple(c * Rational(sum));
}

/// (pi - B_n)/pi from the tuples with gamma_1 = +1 and beta < 0.
inline Rational borwein_deficit(unsigned n) {
  if (n == 0) throw DomainError("borwein_deficit expects n >= 1");
  auto rates = borwein_rates(n);
  BigInt L = detail::lcm_of_denominators(rates);
  BigInt sum = 0;
  unsigned p = n - 1;
  detail::enumerate_scaled(rates, n, 1, L, [&](const BigInt& beta, int sign) {
    if (beta >= 0) return;
    BigInt t = boost::multiprecision::pow(beta, p);
    if (sign > 0) sum += t;
    else sum -= t;
  });
  Rational c = Rational(double_factorial(2 * n - 1)) * Rational(4) /
               (Rational(BigInt(1) << n) * Rational(factorial(p)) * Rational(boost::multiprecision::pow(L, p)));
  return c * Rational(sum);
}

/// sum_{gamma_1 = 1} sign(gamma) beta^(n-1)/(n-1)! == 2^(n-1)/(2n-1)!!
inline bool coefficient_identity_check(unsigned n) {
  if (n == 0) throw DomainError("coefficient_identity_check expects n >= 1");
  auto rates = borwein_rates(n);
  BigInt L = detail::lcm_of_denominators(rates);
  BigInt sum = 0;
  unsigned p = n - 1;
  detail::enumerate_scaled(rates, n, 1, L, [&](const BigInt& beta, int sign) {
    BigInt t = boost::multiprecision::pow(beta, p);
    if (sign > 0) sum += t;
    else sum -= t;
  });
  Rational lhs = Rational(sum) / (Rational(factorial(p)) * Rational(boost::multiprecision::pow(L, p)));
  Rational rhs = Rational(BigInt(1) << p) / Rational(double_factorial(2 * n - 1));
  return lhs == rhs;
}

/// B_n through the operator layer: 2 pi lim_{y->0} prod_k sinc(-i d/(2k-1)) delta(y).
inline ExactValue borwein_via_operators(unsigned n, const std::vector<ComplexRational>& perturbation = {}) {
  if (n == 0) throw DomainError("borwein_via_operators expects n >= 1");
  ExpPoly f = ExpPoly::constant(1);
  for (const auto& r : borwein_rates(n)) {
    ComplexRational ia(0, r);
    ComplexRational h(0, Rational(-1, 2) / r);
    f = f * (ExpPoly::term(h, -1, ia) + ExpPoly::term(-h, -1, -ia));
  }
  RampSum shape = apply_to_delta(word_of(f, Variant::imaginary_fourier), perturbation);
  return ExactValue::pi_multiple(Rational(2) * eval_limit_at_zero(shape).rational_part());
}

// ---------------------------------------------------------------------------

struct SincProductSpec {
  std::vector<Rational> sinc_rates;  // a_i
  std::vector<Rational> cos_rates;   // b_j
  Rational outer_rate = 1;           // c
};

struct SincProductResult {
  ExactValue value;
  bool lord_condition = false;  // c > sum a + sum b
  std::vector<std::string> notes;
};

/// int sinc(a_1 x)...sinc(a_m x) cos(b_1 x)...cos(b_n x) sinc(c x) dx.
/// Computed on rates divided by c, then scaled by 1/c.
inline SincProductResult sinc_cos_product_integral(const SincProductSpec& spec) {
  if (spec.outer_rate.sign() <= 0) throw DomainError("outer rate must be positive");
  for (const auto& r : spec.sinc_rates)
    if (r.sign() <= 0) throw DomainError("sinc rates must be positive");
  for (const auto& r : spec.cos_rates)
    if (r.sign() <= 0) throw DomainError("cos rates must be positive");

  const Rational& c = spec.outer_rate;
  std::vector<Rational> rates;
  Rational total, prod = 1;
  for (const auto& a : spec.sinc_rates) {
    rates.push_back(a / c);
    prod *= a / c;
    total += a;
  }
  for (const auto& b : spec.cos_rates) {
    rates.push_back(b / c);
    total += b;
  }
  std::size_t m = spec.sinc_rates.size();
  detail::check_tuple_length(rates.size());

  // sum sign(gamma) [R_m(beta + 1) - R_m(beta - 1)] on the scaled integer lattice.
  BigInt L = detail::lcm_of_denominators(rates);
  BigInt sum = 0, half_steps = 0;  // half_steps counts Theta(0) contributions of weight 1/2
  auto ramp_scaled = [&](const BigInt& arg, int sign) {
    if (arg > 0) {
      BigInt t = boost::multiprecision::pow(arg, static_cast<unsigned>(m));
      if (sign > 0) sum += t;
      else sum -= t;
    } else if (arg == 0 && m == 0) {
      half_steps += sign;
    }
  };
  if (rates.empty()) {
    ramp_scaled(L, 1);
    ramp_scaled(-L, -1);
  } else {
    detail::enumerate_scaled(rates, m, 0, L, [&](const BigInt& beta, int sign) {
      ramp_scaled(beta + L, sign);
      ramp_scaled(beta - L, -sign);
    });
  }
  Rational ramps = (Rational(sum) + Rational(half_steps) / Rational(2)) /
                   (Rational(factorial(static_cast<unsigned>(m))) *
                    Rational(boost::multiprecision::pow(L, static_cast<unsigned>(m))));
  Rational scale = (Rational(BigInt(1) << rates.size()) * prod).inverse();

  SincProductResult out;
  out.value = ExactValue::pi_multiple(scale * ramps / c);
  out.lord_condition = c > total;
  if (c != Rational(1))
    out.notes.push_back("outer rate c = " + c.to_string() +
                        ": the value carries the 1/c factor from substituting u = c*x; the closed form pi holds "
                        "only for c = 1");
  if (!out.lord_condition)
    out.notes.push_back("condition c > sum of rates fails (sum = " + total.to_string() + ")");
  return out;
}

// ---------------------------------------------------------------------------

namespace detail {
inline std::string gaussian_atom(const Rational& t) {
  return "sqrt(2*pi)*exp(-" + (t * t / Rational(2)).to_string() + ")";
}
inline std::string erf_atom(const Rational& t) { return "pi*erf(" + t.to_string() + "/sqrt(2))"; }
}  // namespace detail

/// int sinc(x)^n e^{-x^2/2} dx = sqrt(2 pi)/2^n sum_k (-1)^k C(n,k) G_n(n - 2k)
/// with G_n the n-th anti-derivative of the Gaussian. The Gaussian kernel
/// identity exp(d^2/2) delta = e^{-y^2/2}/sqrt(2 pi) is taken as given.
/// A nonzero y gives int sinc(x)^n e^{-x^2/2} e^{ixy} dx (arguments y + n - 2k).
inline TransformResult sinc_power_gaussian(unsigned n, const std::vector<Rational>& perturbation = {},
                                           const Rational& y = 0) {
  GaussianChain g = gaussian_chain(n);
  if (!perturbation.empty()) {
    std::size_t deg_plus_one = GaussianChain::trimmed(perturbation).size();
    if (deg_plus_one > n)
      throw DomainError("perturbation degree must be below the anti-derivative order " + std::to_string(n));
    for (std::size_t i = 0; i < perturbation.size(); ++i) detail::add_at(g.r, i, perturbation[i]);
  }
  using boost::multiprecision::exp;
  using boost::multiprecision::sqrt;
  const Real root2pi = sqrt(2 * real_pi());
  ExactValue total;
  Rational unit = Rational(BigInt(1) << n).inverse();
  auto horner = [](const std::vector<Rational>& c, const Rational& t) {
    Rational acc;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
    return acc;
  };
  for (unsigned k = 0; k <= n; ++k) {
    Rational t = y + Rational(static_cast<long long>(n) - 2 * static_cast<long long>(k));
    Rational w = unit * Rational(binomial(n, k));
    if (k % 2) w = -w;
    Rational pe = w * horner(g.p, t), qs = w * horner(g.q, t), rr = w * horner(g.r, t);
    Rational at = t.abs();
    if (!pe.is_zero()) {
      if (at.is_zero()) total += ExactValue::atom(pe, "sqrt(2*pi)", root2pi);
      else total += ExactValue::atom(pe, detail::gaussian_atom(at), root2pi * exp(-(at * at).to_real() / 2));
    }
    if (!qs.is_zero() && !at.is_zero()) {
      // sqrt(2 pi) * sqrt(pi/2) erf(t/sqrt 2) = pi erf(t/sqrt 2); erf is odd.
      Rational c = t.sign() < 0 ? -qs : qs;
      total += ExactValue::atom(c, detail::erf_atom(at), real_pi() * erf(at.to_real() / sqrt(Real(2))));
    }
    if (!rr.is_zero()) total += ExactValue::atom(rr, "sqrt(2*pi)", root2pi);
  }
  auto r = TransformResult::from_exact(total, "gaussian", "sqrt(2*pi) * sinc^n(-i d/dy) e^{-y^2/2} at y = 0, "
                                                          "= sqrt(2*pi)/2^n (T_1 - T_-1)^n g_n(0)");
  r.diagnostics.notes.push_back("g_n = anti-derivative of order " + std::to_string(n) + " of e^{-y^2/2}, parity representative");
  return r;
}

}  // namespace opcalc
