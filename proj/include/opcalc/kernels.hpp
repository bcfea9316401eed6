#pragma once

// Closed-form targets for operator words: the 1/y log chain, the Gaussian
// anti-derivative chain, and piecewise exponentials (Green's functions).

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "opcalc/error.hpp"
#include "opcalc/exact.hpp"

namespace opcalc {

// ---------------------------------------------------------------------------
// erf in working precision. Taylor series up to |x| = 3, Lentz continued
// fraction for erfc beyond.

inline Real erf(const Real& x) {
  using boost::multiprecision::abs;
  using boost::multiprecision::exp;
  using boost::multiprecision::sqrt;
  if (x == 0) return 0;
  if (x < 0) return -erf(-x);
  const Real eps = std::numeric_limits<Real>::epsilon();
  if (x <= 3) {
    Real x2 = x * x, term = x, sum = x;
    for (long n = 1; n < 10000; ++n) {
      term *= -x2 / Real(n);
      Real add = term / Real(2 * n + 1);
      sum += add;
      if (abs(add) < eps * abs(sum) * Real(1e-3)) break;
    }
    return 2 * sum / sqrt(real_pi());
  }
  // erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
  const Real tiny = Real("1e-300");
  Real f = x, c = x, d = 0;
  for (long k = 1; k < 100000; ++k) {
    Real a = Real(k) / 2;
    d = x + a * d;
    if (d == 0) d = tiny;
    c = x + a / c;
    if (c == 0) c = tiny;
    d = 1 / d;
    Real delta = c * d;
    f *= delta;
    if (abs(delta - 1) < eps) break;
  }
  return 1 - exp(-x * x) / (sqrt(real_pi()) * f);
}

// ---------------------------------------------------------------------------
// LogChain: sum of c * y^m and c * y^m * ln(y).

class LogChain {
 public:
  using Key = std::pair<int, bool>;  // (power, log flag)

  LogChain() = default;
  static LogChain monomial(const ComplexRational& c, int m, bool log_flag = false) {
    LogChain l;
    l.add(c, m, log_flag);
    return l;
  }

  void add(const ComplexRational& c, int m, bool log_flag) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(Key{m, log_flag}, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  const std::map<Key, ComplexRational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  friend LogChain operator+(LogChain a, const LogChain& b) {
    for (const auto& [k, c] : b.terms_) a.add(c, k.first, k.second);
    return a;
  }
  friend LogChain operator*(const ComplexRational& s, LogChain l) {
    LogChain r;
    for (const auto& [k, c] : l.terms_) r.add(c * s, k.first, k.second);
    return r;
  }
  friend bool operator==(const LogChain& a, const LogChain& b) { return a.terms_ == b.terms_; }

  LogChain derivative() const {
    LogChain r;
    for (const auto& [k, c] : terms_) {
      auto [m, lg] = k;
      r.add(c * ComplexRational(m), m - 1, lg);
      if (lg) r.add(c, m - 1, false);
    }
    return r;
  }

  /// Anti-derivative with every integration constant zero.
  LogChain antiderivative() const {
    LogChain r;
    for (const auto& [k, c] : terms_) {
      auto [m, lg] = k;
      if (!lg) {
        if (m == -1) r.add(c, 0, true);
        else r.add(c * ComplexRational(Rational(1, m + 1)), m + 1, false);
      } else {
        if (m == -1) throw DomainError("anti-derivative of ln(y)/y leaves the log-chain family");
        Rational inv(1, m + 1);
        r.add(c * ComplexRational(inv), m + 1, true);
        r.add(c * ComplexRational(-inv * inv), m + 1, false);
      }
    }
    return r;
  }

  /// Exact value at rational t > 0: rational part plus log(p) atoms.
  ExactValue exact_at(const Rational& t) const {
    if (t.sign() <= 0) throw DomainError("log chain evaluated at y = " + t.to_string() + " <= 0");
    ExactValue out;
    for (const auto& [k, c] : terms_) {
      if (!c.is_real()) throw DomainError("complex log-chain coefficient");
      auto [m, lg] = k;
      Rational tm = t.pow(m);
      if (!lg) out += ExactValue::rational(c.re * tm);
      else if (t != Rational(1)) out += exact_log(t) * (c.re * tm);
    }
    return out;
  }

  /// Limit as y -> 0+. Finite only when every term vanishes or is constant.
  ExactValue limit_at_zero_plus() const {
    ExactValue out;
    for (const auto& [k, c] : terms_) {
      auto [m, lg] = k;
      if (m >= 1) continue;
      if (m == 0 && !lg) {
        if (!c.is_real()) throw DomainError("complex log-chain coefficient");
        out += ExactValue::rational(c.re);
        continue;
      }
      throw DomainError("singular as y -> 0+: term y^" + std::to_string(m) + (lg ? "*ln(y)" : ""));
    }
    return out;
  }

  Complex evaluate(const Real& y) const {
    if (y <= 0) throw DomainError("log chain requires y > 0");
    Complex out;
    Real ly = boost::multiprecision::log(y);
    for (const auto& [k, c] : terms_) {
      auto [m, lg] = k;
      Real v = boost::multiprecision::pow(y, m);
      if (lg) v *= ly;
      out += Complex::from(c) * v;
    }
    return out;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [k, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += "(" + c.to_string() + ")*y^" + std::to_string(k.first) + (k.second ? "*ln(y)" : "");
    }
    return out;
  }

 private:
  std::map<Key, ComplexRational> terms_;
};

/// n >= 0: the n-th derivative of 1/y. n < 0: the |n|-th anti-derivative with
/// zero constants.
inline LogChain one_over_y_chain(int n) {
  if (n >= 0) {
    Rational c = Rational(factorial(static_cast<unsigned>(n)));
    if (n % 2) c = -c;
    return LogChain::monomial(c, -n - 1);
  }
  LogChain l = LogChain::monomial(1, -1);
  for (int k = 0; k < -n; ++k) l = l.antiderivative();
  return l;
}

// ---------------------------------------------------------------------------
// GaussianChain: p(y) e^{-y^2/2} + q(y) S(y) + r(y), S(y) = sqrt(pi/2) erf(y/sqrt(2)),
// so S' = e^{-y^2/2}. Polynomials are dense, lowest degree first.

struct GaussianChain {
  std::vector<Rational> p, q, r;

  friend bool operator==(const GaussianChain& a, const GaussianChain& b) {
    return trimmed(a.p) == trimmed(b.p) && trimmed(a.q) == trimmed(b.q) && trimmed(a.r) == trimmed(b.r);
  }

  static std::vector<Rational> trimmed(std::vector<Rational> v) {
    while (!v.empty() && v.back().is_zero()) v.pop_back();
    return v;
  }

  GaussianChain derivative() const {
    GaussianChain d;
    // (p e)' = (p' - y p) e
    d.p.assign(p.size() + 1, 0);
    for (std::size_t i = 1; i < p.size(); ++i) d.p[i - 1] += p[i] * Rational(static_cast<long long>(i));
    for (std::size_t i = 0; i < p.size(); ++i) d.p[i + 1] -= p[i];
    // (q S)' = q' S + q e
    if (d.p.size() < q.size()) d.p.resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) d.p[i] += q[i];
    for (std::size_t i = 1; i < q.size(); ++i) {
      if (d.q.size() < i) d.q.resize(i);
      d.q[i - 1] += q[i] * Rational(static_cast<long long>(i));
    }
    for (std::size_t i = 1; i < r.size(); ++i) {
      if (d.r.size() < i) d.r.resize(i);
      d.r[i - 1] += r[i] * Rational(static_cast<long long>(i));
    }
    d.p = trimmed(d.p);
    d.q = trimmed(d.q);
    d.r = trimmed(d.r);
    return d;
  }

  GaussianChain antiderivative() const;

  Real evaluate(const Real& y) const {
    auto horner = [&](const std::vector<Rational>& c) {
      Real acc = 0;
      for (std::size_t i = c.size(); i-- > 0;) acc = acc * y + c[i].to_real();
      return acc;
    };
    using boost::multiprecision::exp;
    using boost::multiprecision::sqrt;
    Real s = sqrt(real_pi() / 2) * erf(y / sqrt(Real(2)));
    return horner(p) * exp(-y * y / 2) + horner(q) * s + horner(r);
  }
};

namespace detail {

inline void add_at(std::vector<Rational>& v, std::size_t i, const Rational& c) {
  if (v.size() <= i) v.resize(i + 1);
  v[i] += c;
}

// Integrates c * y^k e^{-y^2/2} into out.
inline void integrate_gauss_monomial(GaussianChain& out, std::size_t k, Rational c) {
  while (true) {
    if (k == 0) {
      add_at(out.q, 0, c);
      return;
    }
    // int y^k e = -y^{k-1} e + (k-1) int y^{k-2} e
    add_at(out.p, k - 1, -c);
    if (k == 1) return;
    c *= Rational(static_cast<long long>(k - 1));
    k -= 2;
  }
}

}  // namespace detail

inline GaussianChain GaussianChain::antiderivative() const {
  GaussianChain out;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (!p[k].is_zero()) detail::integrate_gauss_monomial(out, k, p[k]);
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (q[k].is_zero()) continue;
    // int y^k S = y^{k+1}/(k+1) S - 1/(k+1) int y^{k+1} e
    Rational inv(1, static_cast<long long>(k + 1));
    detail::add_at(out.q, k + 1, q[k] * inv);
    detail::integrate_gauss_monomial(out, k + 1, -q[k] * inv);
  }
  for (std::size_t k = 0; k < r.size(); ++k)
    if (!r[k].is_zero()) detail::add_at(out.r, k + 1, r[k] / Rational(static_cast<long long>(k + 1)));
  out.p = trimmed(out.p);
  out.q = trimmed(out.q);
  out.r = trimmed(out.r);
  return out;
}

/// n-th anti-derivative of e^{-y^2/2}; the constants of this recurrence give
/// chains of parity (-1)^n.
inline GaussianChain gaussian_chain(unsigned n) {
  GaussianChain g{{1}, {}, {}};
  for (unsigned k = 0; k < n; ++k) g = g.antiderivative();
  return g;
}

// ---------------------------------------------------------------------------
// PiecewiseExp: sum of c * e^{-a|y - s|}.

struct PiecewiseExpTerm {
  ComplexRational coeff;
  Rational rate;
  Rational shift;
};

class PiecewiseExp {
 public:
  using Key = std::pair<Rational, Rational>;  // (rate, shift)

  void add(const ComplexRational& c, const Rational& rate, const Rational& shift) {
    if (rate.sign() <= 0) throw DomainError("piecewise exponential rate must be positive");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(Key{rate, shift}, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  std::vector<PiecewiseExpTerm> terms() const {
    std::vector<PiecewiseExpTerm> out;
    for (const auto& [k, c] : terms_) out.push_back({c, k.first, k.second});
    return out;
  }

  PiecewiseExp translated(const Rational& b) const {
    PiecewiseExp r;
    for (const auto& [k, c] : terms_) r.add(c, k.first, k.second - b);
    return r;
  }
  friend PiecewiseExp operator+(PiecewiseExp a, const PiecewiseExp& b) {
    for (const auto& [k, c] : b.terms_) a.add(c, k.first, k.second);
    return a;
  }
  friend PiecewiseExp operator*(const ComplexRational& s, const PiecewiseExp& p) {
    PiecewiseExp r;
    for (const auto& [k, c] : p.terms_) r.add(c * s, k.first, k.second);
    return r;
  }

  /// Exact value at rational y as a sum over exp(-q) atoms, scaled by `unit`
  /// (e.g. "pi" turns the atoms into "pi*exp(-q)").
  ExactValue exact_at(const Rational& y, bool times_pi = false) const {
    std::map<Rational, ComplexRational> by_exponent;
    for (const auto& [k, c] : terms_) by_exponent[k.first * (y - k.second).abs()] += c;
    ExactValue out;
    for (const auto& [q, c] : by_exponent) {
      if (!c.im.is_zero()) throw DomainError("piecewise exponential value is not real");
      if (c.re.is_zero()) continue;
      if (q.is_zero()) {
        out += times_pi ? ExactValue::pi_multiple(c.re) : ExactValue::rational(c.re);
        continue;
      }
      Real shadow = boost::multiprecision::exp(-q.to_real());
      std::string name = "exp(-" + q.to_string() + ")";
      if (times_pi) {
        name = "pi*" + name;
        shadow *= real_pi();
      }
      out += ExactValue::atom(c.re, name, shadow);
    }
    return out;
  }

  /// k-th derivative at y. At a breakpoint `right` selects the one-sided branch.
  Complex derivative_at(const Real& y, unsigned k, bool right = true) const {
    Complex out;
    for (const auto& [key, c] : terms_) {
      Real a = key.first.to_real();
      Real t = y - key.second.to_real();
      bool on_right = t > 0 || (t == 0 && right);
      Real w = boost::multiprecision::exp(-a * boost::multiprecision::abs(t)) *
               boost::multiprecision::pow(on_right ? -a : a, static_cast<int>(k));
      out += Complex::from(c) * w;
    }
    return out;
  }

  Complex evaluate(const Real& y) const { return derivative_at(y, 0); }

 private:
  std::map<Key, ComplexRational> terms_;
};

/// e^{-a|y|}/(2a), the Green's function of -d^2 + a^2.
inline PiecewiseExp green_function(const Rational& a) {
  if (a.sign() <= 0) throw DomainError("green_function requires a > 0, got " + a.to_string());
  PiecewiseExp g;
  g.add(ComplexRational((Rational(2) * a).inverse()), a, 0);
  return g;
}

// ---------------------------------------------------------------------------

namespace detail {
inline void check_precision(int digits) {
  if (digits < 1 || digits > std::numeric_limits<Real>::digits10 - 5)
    throw DomainError("precision must be between 1 and " + std::to_string(std::numeric_limits<Real>::digits10 - 5) +
                      " digits");
}
}  // namespace detail

inline Real eval_kernel(const LogChain& chain, const Real& y, int digits = 30) {
  detail::check_precision(digits);
  Complex v = chain.evaluate(y);
  if (v.im != 0) throw DomainError("log chain value is not real");
  return v.re;
}

inline Real eval_kernel(const GaussianChain& chain, const Real& y, int digits = 30) {
  detail::check_precision(digits);
  return chain.evaluate(y);
}

inline Real eval_kernel(const PiecewiseExp& chain, const Real& y, int digits = 30) {
  detail::check_precision(digits);
  Complex v = chain.evaluate(y);
  if (v.im != 0) throw DomainError("piecewise exponential value is not real");
  return v.re;
}

}  // namespace opcalc
