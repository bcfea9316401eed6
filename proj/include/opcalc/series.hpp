#pragma once

// Power-series representation of integrands and the series-based routes:
// the Laurent Laplace sum f(-d/dy) 1/y = sum a_k k!/y^(k+1) and the
// finite-interval transforms f(-i d/dy) (e^{iby}-e^{iay})/(iy).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "opcalc/error.hpp"
#include "opcalc/exact.hpp"
#include "opcalc/expr.hpp"

namespace opcalc {

inline constexpr std::size_t kDefaultTruncation = 80;

struct PowerSeries {
  std::vector<ComplexRational> coeffs;  // a_0 .. a_N
  std::size_t order = 0;                // N
  ExprPtr closed_form;                  // expression the coefficients expand, if any
  std::optional<double> radius_hint;    // +inf for entire functions

  PowerSeries() = default;
  explicit PowerSeries(std::vector<ComplexRational> c, ExprPtr form = nullptr,
                       std::optional<double> radius = std::numeric_limits<double>::infinity())
      : coeffs(std::move(c)), order(coeffs.empty() ? 0 : coeffs.size() - 1),
        closed_form(std::move(form)), radius_hint(radius) {
    if (coeffs.empty()) coeffs.push_back(0);
  }

  const ComplexRational& operator[](std::size_t k) const { return coeffs[k]; }
  bool is_real() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](const ComplexRational& c) { return c.is_real(); });
  }
};

struct Majorant {
  std::vector<Rational> coeffs;  // |a_k|
  double abscissa;               // y0; +inf when no convergent Laurent domain was detected
};

enum class Verdict { converged, diverged, inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::converged: return "converged";
    case Verdict::diverged: return "diverged";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct SeriesSum {
  Complex value;
  Verdict verdict = Verdict::inconclusive;
  Real last_term = 0;   // magnitude of the last nonzero term added
  std::size_t terms = 0;
};

// ---------------------------------------------------------------------------
// Convergence monitor shared by every partial-sum route.
//
// Only nonzero terms count as steps. Converged: at least five steps, the last
// three step sizes below tol * max(1, |S|), and the last five magnitudes
// non-increasing. Diverged: magnitudes strictly increasing over ten
// consecutive steps. With `transient_growth` set (entire-kernel series whose
// terms rise before they fall) divergence is only judged on the final ten.

class ConvergenceMonitor {
 public:
  explicit ConvergenceMonitor(double tol = 1e-15, bool transient_growth = false)
      : tol_(tol), transient_(transient_growth) {}

  /// Returns true once a verdict is reached. Callers summing exactly pass the
  /// exact partial sum; the running float sum loses digits under cancellation.
  bool add(const Complex& term, const std::optional<Complex>& exact_sum = std::nullopt) {
    Real mag = term.abs();
    sum_ += term;
    if (exact_sum) sum_ = *exact_sum;
    if (mag == 0) return false;
    ++steps_;
    last_ = mag;
    mags_.push_back(mag);
    if (mags_.size() > 11) mags_.erase(mags_.begin());

    std::size_t n = mags_.size();
    if (!transient_ && n >= 11) {
      bool growing = true;
      for (std::size_t i = 1; i < n; ++i) growing = growing && mags_[i] > mags_[i - 1];
      if (growing) {
        verdict_ = Verdict::diverged;
        return true;
      }
    }
    if (steps_ >= 5 && n >= 5) {
      Real scale = std::max(Real(1), sum_.abs());
      bool small = true;
      for (std::size_t i = n - 3; i < n; ++i) small = small && mags_[i] < tol_ * scale;
      bool decreasing = true;
      for (std::size_t i = n - 4; i < n; ++i) decreasing = decreasing && mags_[i] <= mags_[i - 1];
      if (small && decreasing) {
        verdict_ = Verdict::converged;
        return true;
      }
    }
    return false;
  }

  /// A series that ran out of coefficients with its last nonzero term in the
  /// first half of the available range is treated as a finite sum.
  void finish(std::size_t last_nonzero_index, std::size_t available_order) {
    if (verdict_ != Verdict::inconclusive) return;
    if (2 * last_nonzero_index <= available_order) {
      verdict_ = Verdict::converged;
      return;
    }
    if (transient_ && mags_.size() >= 11) {
      bool growing = true;
      for (std::size_t i = 1; i < mags_.size(); ++i) growing = growing && mags_[i] > mags_[i - 1];
      if (growing) verdict_ = Verdict::diverged;
    }
  }

  SeriesSum result() const { return SeriesSum{sum_, verdict_, last_, steps_}; }
  Verdict verdict() const { return verdict_; }

 private:
  double tol_;
  bool transient_;
  Complex sum_;
  Real last_ = 0;
  std::size_t steps_ = 0;
  std::vector<Real> mags_;
  Verdict verdict_ = Verdict::inconclusive;
};

// ---------------------------------------------------------------------------
// Truncated Laurent arithmetic used while expanding expressions.

namespace detail {

struct Laurent {
  int low = 0;                      // power of c[0]
  std::vector<ComplexRational> c;   // valid through power `high`
  int high() const { return low + static_cast<int>(c.size()) - 1; }
  ComplexRational at(int power) const {
    if (power < low || power > high()) return 0;
    return c[static_cast<std::size_t>(power - low)];
  }
};

inline Laurent laurent_constant(ComplexRational v, int upto) {
  Laurent s{0, std::vector<ComplexRational>(static_cast<std::size_t>(std::max(upto, 0)) + 1)};
  s.c[0] = std::move(v);
  return s;
}

inline Laurent laurent_add(const Laurent& a, const Laurent& b, int sign, int upto) {
  Laurent r;
  r.low = std::min(a.low, b.low);
  for (int p = r.low; p <= upto; ++p) {
    ComplexRational v = a.at(p);
    if (sign > 0) v += b.at(p);
    else v -= b.at(p);
    r.c.push_back(v);
  }
  return r;
}

inline Laurent laurent_mul(const Laurent& a, const Laurent& b, int upto) {
  Laurent r;
  r.low = a.low + b.low;
  if (upto < r.low) {
    r.c.assign(1, 0);
    return r;
  }
  r.c.assign(static_cast<std::size_t>(upto - r.low + 1), 0);
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.c.size(); ++j) {
      int p = r.low + static_cast<int>(i + j);
      if (p > upto) break;
      if (b.c[j].is_zero()) continue;
      r.c[static_cast<std::size_t>(p - r.low)] += a.c[i] * b.c[j];
    }
  }
  return r;
}

inline Laurent laurent_scale(Laurent a, const ComplexRational& s) {
  for (auto& v : a.c) v = v * s;
  return a;
}

/// exp(g) for g with zero constant term: h' = g' h.
inline Laurent laurent_exp(const Laurent& g, int upto) {
  std::vector<ComplexRational> h(static_cast<std::size_t>(upto) + 1);
  h[0] = 1;
  for (int n = 1; n <= upto; ++n) {
    ComplexRational acc;
    for (int k = 1; k <= n; ++k) {
      ComplexRational gk = g.at(k);
      if (!gk.is_zero()) acc += ComplexRational(Rational(k)) * gk * h[static_cast<std::size_t>(n - k)];
    }
    h[static_cast<std::size_t>(n)] = acc * ComplexRational(Rational(1, n));
  }
  return Laurent{0, std::move(h)};
}

// Static lower bound on the valuation, used to size intermediate orders.
inline int valuation_bound(const Expr& e);

/// Exact polynomial when `e` is polynomial in x with rational coefficients.
inline std::optional<std::vector<Rational>> polynomial_of(const Expr& e) {
  using Poly = std::vector<Rational>;
  auto mulp = [](const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
  };
  if (auto p = e.as<Expr::Number>()) return Poly{p->value};
  if (e.as<Expr::Var>()) return Poly{0, 1};
  if (auto p = e.as<Expr::Neg>()) {
    auto a = polynomial_of(*p->arg);
    if (!a) return std::nullopt;
    for (auto& v : *a) v = -v;
    return a;
  }
  if (auto p = e.as<Expr::Binary>()) {
    auto a = polynomial_of(*p->lhs);
    auto b = polynomial_of(*p->rhs);
    if (!a || !b) return std::nullopt;
    if (p->op == '+' || p->op == '-') {
      Poly r(std::max(a->size(), b->size()));
      for (std::size_t i = 0; i < a->size(); ++i) r[i] += (*a)[i];
      for (std::size_t i = 0; i < b->size(); ++i) r[i] += p->op == '+' ? (*b)[i] : -(*b)[i];
      return r;
    }
    if (p->op == '*') return mulp(*a, *b);
    if (b->size() == 1 && !(*b)[0].is_zero()) {
      for (auto& v : *a) v /= (*b)[0];
      return a;
    }
    // Division by a higher-degree polynomial is only polynomial if it divides evenly; not needed.
    return std::nullopt;
  }
  if (auto p = e.as<Expr::Pow>()) {
    if (p->exponent < 0) return std::nullopt;
    auto b = polynomial_of(*p->base);
    if (!b) return std::nullopt;
    Poly acc{1};
    for (long long k = 0; k < p->exponent; ++k) acc = mulp(acc, *b);
    return acc;
  }
  return std::nullopt;
}

/// Monomial c*x^k, if the polynomial has exactly one nonzero coefficient.
inline std::optional<std::pair<Rational, int>> monomial_of(const Expr& e) {
  auto p = polynomial_of(e);
  if (!p) return std::nullopt;
  std::optional<std::pair<Rational, int>> out;
  for (std::size_t k = 0; k < p->size(); ++k) {
    if ((*p)[k].is_zero()) continue;
    if (out) return std::nullopt;
    out = std::make_pair((*p)[k], static_cast<int>(k));
  }
  return out;
}

inline int valuation_bound(const Expr& e) {
  if (e.as<Expr::Var>()) return 1;
  if (auto p = e.as<Expr::Neg>()) return valuation_bound(*p->arg);
  if (auto p = e.as<Expr::Binary>()) {
    int a = valuation_bound(*p->lhs), b = valuation_bound(*p->rhs);
    switch (p->op) {
      case '+': case '-': return std::min(a, b);
      case '*': return a + b;
      default: {
        auto m = monomial_of(*p->rhs);
        return a - (m ? m->second : 0);
      }
    }
  }
  if (auto p = e.as<Expr::Pow>()) {
    if (p->exponent >= 0) return static_cast<int>(p->exponent) * valuation_bound(*p->base);
    auto m = monomial_of(*p->base);
    return m ? static_cast<int>(p->exponent) * m->second : 0;
  }
  return 0;
}

inline Laurent expand(const Expr& e, int upto);

inline Laurent expand_call(const Expr::Call& call, int upto) {
  if (call.func == Func::sqrt) {
    auto v = constant_value(*call.arg);
    if (!v) throw UnsupportedFamily("not series-representable on R: sqrt of a non-constant argument is not entire");
    if (v->sign() < 0) throw UnsupportedFamily("sqrt of a negative constant");
    BigInt n = v->numerator(), d = v->denominator();
    BigInt rn = boost::multiprecision::sqrt(n), rd = boost::multiprecision::sqrt(d);
    if (rn * rn != n || rd * rd != d)
      throw UnsupportedFamily("sqrt(" + v->to_string() + ") is irrational; coefficients must stay exact");
    return laurent_constant(ComplexRational(Rational(rn, rd)), upto);
  }
  Laurent g = expand(*call.arg, std::max(upto, 1));
  for (int p = g.low; p <= 0 && p <= g.high(); ++p) {
    if (!g.at(p).is_zero())
      throw UnsupportedFamily(std::string(func_name(call.func)) +
                              " of an argument with a nonzero constant or pole term has no exact rational expansion");
  }
  switch (call.func) {
    case Func::exp: return laurent_exp(g, upto);
    case Func::sin:
    case Func::cos: {
      ComplexRational i = ComplexRational::i();
      Laurent ep = laurent_exp(laurent_scale(g, i), upto);
      Laurent em = laurent_exp(laurent_scale(g, -i), upto);
      if (call.func == Func::cos) return laurent_scale(laurent_add(ep, em, +1, upto), Rational(1, 2));
      return laurent_scale(laurent_add(ep, em, -1, upto), ComplexRational(0, Rational(-1, 2)));
    }
    case Func::sinc: {
      // sinc(g) = sum_j (-1)^j g^(2j) / (2j+1)!
      Laurent g2 = laurent_mul(g, g, upto);
      Laurent power = laurent_constant(1, upto);
      Laurent acc = laurent_constant(1, upto);
      BigInt fact = 1;
      for (int j = 1; 2 * j <= upto; ++j) {
        power = laurent_mul(power, g2, upto);
        fact *= BigInt(2 * j) * (2 * j + 1);
        Rational c = Rational(j % 2 ? -1 : 1) / Rational(fact);
        acc = laurent_add(acc, laurent_scale(power, c), +1, upto);
      }
      return acc;
    }
    case Func::sqrt: break;
  }
  return laurent_constant(0, upto);
}

inline Laurent expand(const Expr& e, int upto) {
  if (auto p = e.as<Expr::Number>()) return laurent_constant(p->value, upto);
  if (e.as<Expr::Var>()) {
    Laurent s = laurent_constant(0, std::max(upto, 1));
    s.c[1] = 1;
    return s;
  }
  if (e.as<Expr::Pi>()) throw UnsupportedFamily("pi is not rational; series coefficients must stay exact");
  if (auto p = e.as<Expr::Neg>()) return laurent_scale(expand(*p->arg, upto), -1);
  if (auto p = e.as<Expr::Binary>()) {
    if (p->op == '+' || p->op == '-')
      return laurent_add(expand(*p->lhs, upto), expand(*p->rhs, upto), p->op == '+' ? 1 : -1, upto);
    if (p->op == '*') {
      int la = valuation_bound(*p->lhs), lb = valuation_bound(*p->rhs);
      return laurent_mul(expand(*p->lhs, upto - lb), expand(*p->rhs, upto - la), upto);
    }
    auto m = monomial_of(*p->rhs);
    if (!m)
      throw UnsupportedFamily("not series-representable on R: division by '" + to_string(*p->rhs) +
                              "' (only constant or monomial divisors keep the expansion entire)");
    Laurent a = expand(*p->lhs, upto + m->second);
    a.low -= m->second;
    a = laurent_scale(std::move(a), m->first.inverse());
    if (a.high() > upto) a.c.resize(static_cast<std::size_t>(upto - a.low + 1));
    return a;
  }
  if (auto p = e.as<Expr::Pow>()) {
    if (p->exponent < 0) {
      auto m = monomial_of(*p->base);
      if (!m) throw UnsupportedFamily("not series-representable on R: negative power of '" + to_string(*p->base) + "'");
      Laurent s;
      s.low = static_cast<int>(p->exponent) * m->second;
      s.c.assign(static_cast<std::size_t>(std::max(upto - s.low, 0)) + 1, 0);
      s.c[0] = m->first.pow(p->exponent);
      return s;
    }
    int lb = valuation_bound(*p->base);
    int n = static_cast<int>(p->exponent);
    Laurent base = expand(*p->base, upto - (n - 1) * lb);
    Laurent acc = laurent_constant(1, upto);
    for (int k = 0; k < n; ++k) acc = laurent_mul(acc, base, upto);
    return acc;
  }
  return expand_call(*e.as<Expr::Call>(), upto);
}

}  // namespace detail

/// Exact Taylor coefficients at 0 through order N.
inline PowerSeries taylor_of(const ExprPtr& ast, std::size_t order = kDefaultTruncation) {
  detail::Laurent s = detail::expand(*ast, static_cast<int>(order));
  for (int p = s.low; p < 0; ++p) {
    if (!s.at(p).is_zero())
      throw UnsupportedFamily("not series-representable on R: '" + to_string(*ast) + "' has a pole at 0");
  }
  std::vector<ComplexRational> c(order + 1);
  for (std::size_t k = 0; k <= order; ++k) c[k] = s.at(static_cast<int>(k));
  return PowerSeries(std::move(c), ast);
}

inline PowerSeries series_from(std::vector<ComplexRational> coeffs) { return PowerSeries(std::move(coeffs)); }

// ---------------------------------------------------------------------------
// Majorant abscissa

namespace detail {
inline double log_abs(const ComplexRational& z) {
  // |re| + |im| bounds the modulus and stays rational.
  Rational m = z.re.abs() + z.im.abs();
  return boost::multiprecision::log(m.to_real()).convert_to<double>();
}
}  // namespace detail

/// y0 estimated as the max over the tail third of (|a_k| k!)^(1/(k+1)).
/// A tail that keeps growing by more than 10% across the third reports +inf.
inline Majorant majorant_abscissa(const PowerSeries& series) {
  Majorant m;
  for (const auto& c : series.coeffs) m.coeffs.push_back(c.re.abs() + c.im.abs());
  std::size_t n = series.coeffs.size();
  std::size_t start = (2 * n) / 3;
  if (start >= n) start = n - 1;
  double best = 0, first = -1, last = 0;
  for (std::size_t k = start; k < n; ++k) {
    double est = 0;
    if (!m.coeffs[k].is_zero()) {
      double lg = detail::log_abs(series.coeffs[k]) + std::lgamma(static_cast<double>(k) + 1.0);
      est = std::exp(lg / static_cast<double>(k + 1));
      if (first < 0) first = est;
      last = est;
    }
    best = std::max(best, est);
  }
  if (first > 0 && n >= 9 && last > 1.1 * first) best = std::numeric_limits<double>::infinity();
  m.abscissa = best;
  return m;
}

// ---------------------------------------------------------------------------
// Laurent Laplace route

/// Partial sums of sum a_k k!/y^(k+1); converges only for y beyond the
/// majorant abscissa.
inline SeriesSum laplace_laurent(const PowerSeries& series, const Real& y, double tol = 1e-15) {
  if (y <= 0) throw DomainError("laplace_laurent requires y > 0 (1/y has a pole at 0)");
  ConvergenceMonitor monitor(tol);
  Real inv_y = Real(1) / y;
  Real weight = inv_y;  // k!/y^(k+1)
  std::size_t last_nonzero = 0;
  for (std::size_t k = 0; k < series.coeffs.size(); ++k) {
    if (k > 0) weight *= Real(static_cast<long>(k)) * inv_y;
    const auto& a = series.coeffs[k];
    if (a.is_zero()) continue;
    last_nonzero = k;
    if (monitor.add(Complex::from(a) * weight)) break;
  }
  monitor.finish(last_nonzero, series.order);
  return monitor.result();
}

// ---------------------------------------------------------------------------
// Finite-interval routes

enum class Kernel { fourier, laplace, none };

/// Evaluates sum_k a_k (-i d/dy)^k G(y) with G(y) = (e^{iby}-e^{iay})/(iy)
/// (Fourier), sum_k a_k (d/dy)^k G(y) with G(y) = (e^{by}-e^{ay})/y (Laplace),
/// or the y -> 0 limit sum a_k (b^{k+1}-a^{k+1})/(k+1) (none). G's derivatives
/// come from its own Taylor coefficients at 0.
inline SeriesSum finite_interval_transform(const PowerSeries& series, const Real& a, const Real& b, const Real& y,
                                           Kernel kernel, double tol = 1e-15) {
  if (series.radius_hint) {
    double reach = std::max(std::abs(a.convert_to<double>()), std::abs(b.convert_to<double>()));
    if (*series.radius_hint <= reach)
      throw DomainError("series radius does not cover [a, b]");
  }
  ConvergenceMonitor monitor(tol);
  std::size_t n = series.coeffs.size();
  std::size_t last_nonzero = 0;

  if (kernel == Kernel::none || y == 0) {
    // G^{(k)}(0) * (-i)^k = (b^{k+1}-a^{k+1})/(k+1) for the Fourier kernel, and
    // the same real value for the Laplace kernel.
    Real bp = b, ap = a;
    for (std::size_t k = 0; k < n; ++k) {
      Real w = (bp - ap) / Real(static_cast<long>(k + 1));
      bp *= b;
      ap *= a;
      const auto& c = series.coeffs[k];
      if (c.is_zero()) continue;
      last_nonzero = k;
      if (monitor.add(Complex::from(c) * w)) break;
    }
    monitor.finish(last_nonzero, series.order);
    return monitor.result();
  }

  // Taylor coefficients g_m of G up to order M.
  double reach = std::max(std::abs(a.convert_to<double>()), std::abs(b.convert_to<double>()));
  double yd = std::abs(y.convert_to<double>());
  std::size_t extra = static_cast<std::size_t>(std::ceil(4.0 * reach * (1.0 + yd) + 4.0 * reach * yd)) + 80;
  std::size_t m_max = n + extra;
  std::vector<Complex> g(m_max + 1);
  {
    Real bp = b, ap = a, fact = 1;  // (m+1)!
    Complex ipow(1, 0);
    for (std::size_t m = 0; m <= m_max; ++m) {
      fact *= Real(static_cast<long>(m + 1));
      Real w = (bp - ap) / fact;
      bp *= b;
      ap *= a;
      g[m] = kernel == Kernel::fourier ? ipow * w : Complex(w);
      if (kernel == Kernel::fourier) ipow = ipow * Complex(0, 1);
    }
  }
  Complex mi_pow(1, 0);  // (-i)^k
  for (std::size_t k = 0; k < n; ++k) {
    const auto& c = series.coeffs[k];
    if (!c.is_zero()) {
      // G^{(k)}(y) = sum_{m>=k} g_m m!/(m-k)! y^(m-k)
      Complex deriv;
      Real falling = 1;  // m!/(m-k)!
      for (std::size_t j = 1; j <= k; ++j) falling *= Real(static_cast<long>(j));
      Real ypow = 1;
      for (std::size_t m = k; m <= m_max; ++m) {
        if (m > k) {
          falling = falling * Real(static_cast<long>(m)) / Real(static_cast<long>(m - k));
          ypow *= y;
        }
        deriv += g[m] * (falling * ypow);
      }
      Complex term = Complex::from(c) * deriv;
      if (kernel == Kernel::fourier) term = term * mi_pow;
      last_nonzero = k;
      if (monitor.add(term)) break;
    }
    if (kernel == Kernel::fourier) mi_pow = mi_pow * Complex(0, -1);
  }
  monitor.finish(last_nonzero, series.order);
  return monitor.result();
}

}  // namespace opcalc
