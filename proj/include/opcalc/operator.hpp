#pragma once

// Formal operator layer: exponential polynomials, their operator words
// f(-d), f(-i d), f(d) as sums c*T_b*d^n, and ramp sums the words act on.

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "opcalc/error.hpp"
#include "opcalc/exact.hpp"
#include "opcalc/expr.hpp"
#include "opcalc/series.hpp"

namespace opcalc {

// ---------------------------------------------------------------------------
// Exponential polynomials: sum of c * x^n * e^{kappa x}, n any integer.

struct ExpPolyKey {
  Rational kappa_re, kappa_im;
  int power;
  friend auto operator<=>(const ExpPolyKey&, const ExpPolyKey&) = default;
  friend bool operator==(const ExpPolyKey&, const ExpPolyKey&) = default;
  ComplexRational kappa() const { return {kappa_re, kappa_im}; }
};

class ExpPoly {
 public:
  using Map = std::map<ExpPolyKey, ComplexRational>;

  ExpPoly() = default;
  static ExpPoly constant(const ComplexRational& c) {
    ExpPoly p;
    p.add(c, 0, 0);
    return p;
  }
  static ExpPoly term(const ComplexRational& c, int power, const ComplexRational& kappa) {
    ExpPoly p;
    p.add(c, power, kappa);
    return p;
  }

  void add(const ComplexRational& c, int power, const ComplexRational& kappa) {
    if (c.is_zero()) return;
    ExpPolyKey key{kappa.re, kappa.im, power};
    auto [it, inserted] = terms_.try_emplace(key, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  const Map& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_single_term() const { return terms_.size() == 1; }

  int min_power() const {
    int m = 0;
    for (const auto& [k, c] : terms_) m = std::min(m, k.power);
    return m;
  }
  int max_power() const {
    int m = 0;
    for (const auto& [k, c] : terms_) m = std::max(m, k.power);
    return m;
  }

  ExpPoly operator-() const {
    ExpPoly r = *this;
    for (auto& [k, c] : r.terms_) c = -c;
    return r;
  }
  friend ExpPoly operator+(ExpPoly a, const ExpPoly& b) {
    for (const auto& [k, c] : b.terms_) a.add(c, k.power, k.kappa());
    return a;
  }
  friend ExpPoly operator-(const ExpPoly& a, const ExpPoly& b) { return a + (-b); }
  friend ExpPoly operator*(const ExpPoly& a, const ExpPoly& b) {
    ExpPoly r;
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) r.add(ca * cb, ka.power + kb.power, ka.kappa() + kb.kappa());
    return r;
  }
  friend bool operator==(const ExpPoly& a, const ExpPoly& b) { return a.terms_ == b.terms_; }

  /// Coefficient of x^{-k}, k >= 1, in the Laurent expansion at 0.
  ComplexRational principal_coefficient(int k) const {
    ComplexRational acc;
    for (const auto& [key, c] : terms_) {
      int m = -k - key.power;  // need x^power * x^m = x^{-k}
      if (m < 0) continue;
      acc += c * key.kappa().pow(m) * ComplexRational(Rational(1) / Rational(factorial(static_cast<unsigned>(m))));
    }
    return acc;
  }

  /// True when the Laurent expansion at 0 has no principal part.
  bool is_entire() const {
    for (int k = 1; k <= -min_power(); ++k)
      if (!principal_coefficient(k).is_zero()) return false;
    return true;
  }

  template <class T>
  std::pair<T, T> evaluate(const T& x) const {
    using std::cos, std::exp, std::pow, std::sin;
    T re = 0, im = 0;
    for (const auto& [key, c] : terms_) {
      T mag = exp(key.kappa_re.to_real().template convert_to<T>() * x);
      T ph = key.kappa_im.to_real().template convert_to<T>() * x;
      T xp = pow(x, key.power);
      T cr = c.re.to_real().template convert_to<T>(), ci = c.im.to_real().template convert_to<T>();
      T cp = cos(ph), sp = sin(ph);
      re += mag * xp * (cr * cp - ci * sp);
      im += mag * xp * (cr * sp + ci * cp);
    }
    return {re, im};
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [k, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += "(" + c.to_string() + ")";
      if (k.power != 0) out += "*x^" + std::to_string(k.power);
      if (!k.kappa().is_zero()) out += "*exp((" + k.kappa().to_string() + ")*x)";
    }
    return out;
  }

 private:
  Map terms_;
};

namespace detail {

inline std::optional<Rational> linear_rate(const Expr& arg) {
  auto p = polynomial_of(arg);
  if (!p || p->size() > 2) return std::nullopt;
  if (!(*p)[0].is_zero()) return std::nullopt;
  return p->size() == 2 ? (*p)[1] : Rational(0);
}

inline ExpPoly exp_poly_rec(const Expr& e) {
  auto fail = [&](const std::string& why) -> ExpPoly {
    throw UnsupportedFamily("not exponential-polynomial: " + why);
  };
  if (auto p = e.as<Expr::Number>()) return ExpPoly::constant(p->value);
  if (e.as<Expr::Var>()) return ExpPoly::term(1, 1, 0);
  if (e.as<Expr::Pi>()) return fail("pi is not a rational coefficient");
  if (auto p = e.as<Expr::Neg>()) return -exp_poly_rec(*p->arg);
  if (auto p = e.as<Expr::Binary>()) {
    ExpPoly a = exp_poly_rec(*p->lhs);
    ExpPoly b = exp_poly_rec(*p->rhs);
    switch (p->op) {
      case '+': return a + b;
      case '-': return a - b;
      case '*': return a * b;
      default: {
        if (!b.is_single_term()) return fail("division by '" + to_string(*p->rhs) + "' which is not a single term");
        const auto& [k, c] = *b.terms().begin();
        return a * ExpPoly::term(c.inverse(), -k.power, -k.kappa());
      }
    }
  }
  if (auto p = e.as<Expr::Pow>()) {
    ExpPoly base = exp_poly_rec(*p->base);
    if (p->exponent < 0) {
      if (!base.is_single_term()) return fail("negative power of '" + to_string(*p->base) + "'");
      const auto& [k, c] = *base.terms().begin();
      long long n = -p->exponent;
      return ExpPoly::term(c.inverse().pow(n), static_cast<int>(-k.power * n), k.kappa() * ComplexRational(-n));
    }
    ExpPoly acc = ExpPoly::constant(1);
    for (long long i = 0; i < p->exponent; ++i) acc = acc * base;
    return acc;
  }
  const auto& call = *e.as<Expr::Call>();
  if (call.func == Func::sqrt) {
    auto v = constant_value(*call.arg);
    if (v && v->sign() >= 0) {
      BigInt n = v->numerator(), d = v->denominator();
      BigInt rn = boost::multiprecision::sqrt(n), rd = boost::multiprecision::sqrt(d);
      if (rn * rn == n && rd * rd == d) return ExpPoly::constant(Rational(rn, rd));
    }
    return fail("sqrt of '" + to_string(*call.arg) + "' is not rational");
  }
  auto rate = linear_rate(*call.arg);
  if (!rate) return fail(std::string(func_name(call.func)) + " argument '" + to_string(*call.arg) + "' is not a*x");
  const Rational& a = *rate;
  ComplexRational ia(0, a);
  switch (call.func) {
    case Func::exp: return ExpPoly::term(1, 0, a);
    case Func::cos: return ExpPoly::term(Rational(1, 2), 0, ia) + ExpPoly::term(Rational(1, 2), 0, -ia);
    case Func::sin: {
      ComplexRational h(0, Rational(-1, 2));  // 1/(2i)
      return ExpPoly::term(h, 0, ia) + ExpPoly::term(-h, 0, -ia);
    }
    case Func::sinc: {
      if (a.is_zero()) return ExpPoly::constant(1);
      ComplexRational h(0, Rational(-1, 2) / a);  // 1/(2ia)
      return ExpPoly::term(h, -1, ia) + ExpPoly::term(-h, -1, -ia);
    }
    case Func::sqrt: break;
  }
  return fail("unsupported call");
}

}  // namespace detail

inline ExpPoly exp_poly_of(const ExprPtr& ast) { return detail::exp_poly_rec(*ast); }

// ---------------------------------------------------------------------------
// Operator words

struct OperatorTerm {
  ComplexRational coeff;
  Rational shift;  // T_b = e^{b d}
  int power;       // d^n, n < 0 anti-differentiation
};

class OperatorWord {
 public:
  using Key = std::pair<Rational, int>;  // (shift, power)

  OperatorWord() = default;
  static OperatorWord identity() { return term(1, 0, 0); }
  static OperatorWord translation(const Rational& b) { return term(1, b, 0); }
  static OperatorWord derivative(int n) { return term(1, 0, n); }
  static OperatorWord term(const ComplexRational& c, const Rational& shift, int power) {
    OperatorWord w;
    w.add(c, shift, power);
    return w;
  }

  void add(const ComplexRational& c, const Rational& shift, int power) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(Key{shift, power}, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  std::vector<OperatorTerm> terms() const {
    std::vector<OperatorTerm> out;
    for (const auto& [k, c] : terms_) out.push_back({c, k.first, k.second});
    return out;
  }
  const std::map<Key, ComplexRational>& raw() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int min_power() const {
    int m = 0;
    for (const auto& [k, c] : terms_) m = std::min(m, k.second);
    return m;
  }
  int max_power() const {
    int m = 0;
    for (const auto& [k, c] : terms_) m = std::max(m, k.second);
    return m;
  }

  friend OperatorWord operator+(OperatorWord a, const OperatorWord& b) {
    for (const auto& [k, c] : b.terms_) a.add(c, k.first, k.second);
    return a;
  }
  friend OperatorWord operator*(const OperatorWord& a, const OperatorWord& b) {
    OperatorWord r;
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) r.add(ca * cb, ka.first + kb.first, ka.second + kb.second);
    return r;
  }
  friend OperatorWord operator*(const ComplexRational& s, OperatorWord w) {
    for (auto& [k, c] : w.terms_) c = c * s;
    return w;
  }
  friend bool operator==(const OperatorWord& a, const OperatorWord& b) { return a.terms_ == b.terms_; }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [k, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += "(" + c.to_string() + ")";
      if (!k.first.is_zero()) out += "*T[" + k.first.to_string() + "]";
      if (k.second != 0) out += "*d^" + std::to_string(k.second);
    }
    return out;
  }

 private:
  std::map<Key, ComplexRational> terms_;
};

enum class Variant {
  real_laplace,       // f(-d): integrals over the positive half-line / Laplace transforms
  imaginary_fourier,  // f(-i d): Fourier transforms with kernel e^{ixy}
  negative_half_line  // f(d): integrals over the negative half-line
};

/// Maps x -> mu*d. A term c x^n e^{kappa x} becomes c mu^n T_{kappa mu} d^n.
inline OperatorWord word_of(const ExpPoly& f, Variant variant) {
  ComplexRational mu = variant == Variant::real_laplace        ? ComplexRational(-1)
                       : variant == Variant::imaginary_fourier ? ComplexRational(0, -1)
                                                               : ComplexRational(1);
  OperatorWord w;
  for (const auto& [key, c] : f.terms()) {
    ComplexRational shift = key.kappa() * mu;
    if (!shift.is_real())
      throw UnsupportedFamily("complex translation: exponential rate " + key.kappa().to_string() +
                              (variant == Variant::imaginary_fourier ? " grows on the real line"
                                                                      : " oscillates; only real shifts are supported"));
    w.add(c * mu.pow(key.power), shift.re, key.power);
  }
  return w;
}

inline OperatorWord decompose(const ExprPtr& ast, Variant variant) { return word_of(exp_poly_of(ast), variant); }

// ---------------------------------------------------------------------------
// Ramp sums: terms c*R_m(y - s) with R_m(y) = y^m/m! Theta(y) for m >= 0,
// delta(y - s) for m = -1 and delta^{(j)}(y - s) for m = -1 - j, plus an
// unshifted polynomial part (only produced by perturbations).

class RampSum {
 public:
  using Key = std::pair<int, Rational>;  // (order, shift)

  RampSum() = default;
  static RampSum delta(const Rational& s = 0) { return ramp(-1, s); }
  static RampSum ramp(int order, const Rational& s = 0, const ComplexRational& c = 1) {
    RampSum r;
    r.add(c, order, s);
    return r;
  }
  static RampSum polynomial(std::vector<ComplexRational> coeffs) {
    RampSum r;
    r.poly_ = std::move(coeffs);
    r.trim();
    return r;
  }

  void add(const ComplexRational& c, int order, const Rational& s) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(Key{order, s}, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  const std::map<Key, ComplexRational>& terms() const { return terms_; }
  const std::vector<ComplexRational>& poly() const { return poly_; }
  bool is_zero() const { return terms_.empty() && poly_.empty(); }

  friend RampSum operator+(RampSum a, const RampSum& b) {
    for (const auto& [k, c] : b.terms_) a.add(c, k.first, k.second);
    if (a.poly_.size() < b.poly_.size()) a.poly_.resize(b.poly_.size());
    for (std::size_t i = 0; i < b.poly_.size(); ++i) a.poly_[i] += b.poly_[i];
    a.trim();
    return a;
  }
  friend RampSum operator*(const ComplexRational& s, RampSum r) {
    if (s.is_zero()) return {};
    for (auto& [k, c] : r.terms_) c = c * s;
    for (auto& c : r.poly_) c = c * s;
    return r;
  }
  friend bool operator==(const RampSum& a, const RampSum& b) { return a.terms_ == b.terms_ && a.poly_ == b.poly_; }

  /// T_b: F(y) -> F(y + b).
  RampSum translated(const Rational& b) const {
    RampSum r;
    for (const auto& [k, c] : terms_) r.add(c, k.first, k.second - b);
    if (!poly_.empty()) {
      r.poly_.assign(poly_.size(), 0);
      for (std::size_t j = 0; j < poly_.size(); ++j) {
        // (y + b)^j = sum_i C(j, i) b^(j-i) y^i
        for (std::size_t i = 0; i <= j; ++i)
          r.poly_[i] += poly_[j] * ComplexRational(Rational(binomial(static_cast<long long>(j), static_cast<long long>(i))) *
                                                   b.pow(static_cast<long long>(j - i)));
      }
      r.trim();
    }
    return r;
  }

  /// d^n, n < 0 anti-differentiates with zero constants on the polynomial part.
  RampSum differentiated(int n) const {
    RampSum r;
    for (const auto& [k, c] : terms_) r.add(c, k.first - n, k.second);
    std::vector<ComplexRational> p = poly_;
    for (int step = 0; step < std::abs(n); ++step) {
      if (p.empty()) break;
      if (n > 0) {
        std::vector<ComplexRational> q;
        for (std::size_t i = 1; i < p.size(); ++i) q.push_back(p[i] * ComplexRational(static_cast<long long>(i)));
        p = std::move(q);
      } else {
        std::vector<ComplexRational> q(p.size() + 1);
        for (std::size_t i = 0; i < p.size(); ++i)
          q[i + 1] = p[i] * ComplexRational(Rational(1, static_cast<long long>(i + 1)));
        p = std::move(q);
      }
    }
    r.poly_ = std::move(p);
    r.trim();
    return r;
  }

  /// Two-sided limit at a rational point.
  ComplexRational limit_at(const Rational& y) const {
    ComplexRational value, jump;
    for (const auto& [k, c] : terms_) {
      auto [m, s] = k;
      Rational t = y - s;
      if (m < 0) {
        if (t.is_zero()) throw DomainError("singular at " + y.to_string() + ": delta term sits at the evaluation point");
        continue;
      }
      if (m == 0) {
        if (t.is_zero()) jump += c;
        else if (t.sign() > 0) value += c;
        continue;
      }
      if (t.sign() > 0) value += c * ComplexRational(t.pow(m) / Rational(factorial(static_cast<unsigned>(m))));
    }
    if (!jump.is_zero())
      throw DomainError("discontinuous at " + y.to_string() + ": step of size " + jump.to_string());
    Rational yp = 1;
    for (const auto& c : poly_) {
      value += c * ComplexRational(yp);
      yp *= y;
    }
    return value;
  }

  /// Numeric value at y; y must not sit on a step or delta.
  Complex evaluate(const Real& y) const {
    Complex out;
    for (const auto& [k, c] : terms_) {
      auto [m, s] = k;
      Real t = y - s.to_real();
      if (m < 0) {
        if (t == 0) throw DomainError("delta term at the evaluation point");
        continue;
      }
      if (t > 0 || (m > 0 && t == 0)) {
        Real w = m == 0 ? Real(1) : boost::multiprecision::pow(t, m) / Real(factorial(static_cast<unsigned>(m)));
        out += Complex::from(c) * w;
      }
    }
    Real yp = 1;
    for (const auto& c : poly_) {
      out += Complex::from(c) * yp;
      yp *= y;
    }
    return out;
  }

  std::string to_string() const {
    std::string out;
    for (const auto& [k, c] : terms_) {
      if (!out.empty()) out += " + ";
      auto [m, s] = k;
      std::string arg = s.is_zero() ? "y" : (s.sign() > 0 ? "y-" + s.to_string() : "y+" + (-s).to_string());
      std::string base = m >= 0 ? "R" + std::to_string(m) : (m == -1 ? "delta" : "delta^(" + std::to_string(-1 - m) + ")");
      out += "(" + c.to_string() + ")*" + base + "(" + arg + ")";
    }
    for (std::size_t i = 0; i < poly_.size(); ++i) {
      if (poly_[i].is_zero()) continue;
      if (!out.empty()) out += " + ";
      out += "(" + poly_[i].to_string() + ")*y^" + std::to_string(i);
    }
    return out.empty() ? "0" : out;
  }

 private:
  void trim() {
    while (!poly_.empty() && poly_.back().is_zero()) poly_.pop_back();
  }

  std::map<Key, ComplexRational> terms_;
  std::vector<ComplexRational> poly_;
};

inline RampSum apply_word(const OperatorWord& word, const RampSum& target) {
  RampSum out;
  for (const auto& [k, c] : word.raw()) out = out + c * target.translated(k.first).differentiated(k.second);
  return out;
}

inline ExactValue eval_limit_at_zero(const RampSum& rs) {
  ComplexRational v = rs.limit_at(0);
  if (!v.is_real()) throw DomainError("limit at 0 is not real: " + v.to_string());
  return ExactValue::rational(v.re);
}

/// Adds a polynomial of degree < m to a representative of an m-th
/// anti-derivative.
inline RampSum perturb_antiderivative(const RampSum& rs, int m, const std::vector<ComplexRational>& poly) {
  std::size_t degree_plus_one = poly.size();
  while (degree_plus_one > 0 && poly[degree_plus_one - 1].is_zero()) --degree_plus_one;
  if (degree_plus_one > 0 && static_cast<int>(degree_plus_one) > m)
    throw DomainError("perturbation of degree " + std::to_string(degree_plus_one - 1) +
                      " is not admissible for a " + std::to_string(m) + "-th anti-derivative");
  return rs + RampSum::polynomial(std::vector<ComplexRational>(poly.begin(), poly.begin() + static_cast<long>(degree_plus_one)));
}

/// word(d) delta through a single representative of the deepest
/// anti-derivative: with N = -min power, H = R_{N-1} + p and each term acts
/// as c T_b d^{n+N} H. The perturbation p must have degree < N.
inline RampSum apply_to_delta(const OperatorWord& word, const std::vector<ComplexRational>& perturbation = {}) {
  int depth = -word.min_power();
  RampSum h = depth == 0 ? RampSum::delta() : RampSum::ramp(depth - 1);
  h = perturb_antiderivative(h, depth, perturbation);
  RampSum out;
  for (const auto& [k, c] : word.raw()) out = out + c * h.translated(k.first).differentiated(k.second + depth);
  return out;
}

}  // namespace opcalc
