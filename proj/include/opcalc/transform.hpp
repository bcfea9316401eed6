#pragma once

// Integration and transform routes built on the operator layer.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "opcalc/classify.hpp"
#include "opcalc/error.hpp"
#include "opcalc/exact.hpp"
#include "opcalc/kernels.hpp"
#include "opcalc/operator.hpp"
#include "opcalc/result.hpp"
#include "opcalc/series.hpp"
#include "opcalc/sinc_lab.hpp"

namespace opcalc {

inline constexpr long long kDefaultRegularization = 40;
inline constexpr std::size_t kMaxFallbackTruncation = 8192;

namespace detail {

inline int highest_power(const ExpPoly& f) {
  int m = std::numeric_limits<int>::min();
  for (const auto& [k, c] : f.terms()) m = std::max(m, k.power);
  return m;
}

inline std::string term_text(const ComplexRational& c, const Rational& shift, int power) {
  return "(" + c.to_string() + ")*T[" + shift.to_string() + "]*d^" + std::to_string(power);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Delta route

/// f-hat(y) = sqrt(2 pi) * shape(y); int f e^{ixy} dx = 2 pi * shape(y).
struct FourierShape {
  OperatorWord word;
  RampSum shape;

  Complex hat(const Real& y) const { return shape.evaluate(y) * boost::multiprecision::sqrt(2 * real_pi()); }
  Complex integral(const Real& y) const { return shape.evaluate(y) * (2 * real_pi()); }
};

inline FourierShape fourier_via_delta(const ExprPtr& ast, const std::vector<ComplexRational>& perturbation = {}) {
  ExpPoly f;
  try {
    f = exp_poly_of(ast);
  } catch (const UnsupportedFamily& e) {
    throw UnsupportedFamily(std::string(e.what()) + " (Gaussian factors go through the sinc/Gaussian route)");
  }
  FourierShape out;
  if (f.is_zero()) return out;
  if (detail::highest_power(f) > 0)
    throw UnsupportedFamily("positive derivative powers in f(-i d): route to pairing");
  if (!f.is_entire()) throw UnsupportedFamily("'" + to_string(*ast) + "' has a pole at 0");
  out.word = word_of(f, Variant::imaginary_fourier);
  out.shape = apply_to_delta(out.word, perturbation);
  return out;
}

/// 2 pi * shape at a rational point, split into exact real and imaginary parts.
inline TransformResult delta_route_at(const ExprPtr& ast, const Rational& y,
                                      const std::vector<ComplexRational>& perturbation = {}) {
  FourierShape fs = fourier_via_delta(ast, perturbation);
  ComplexRational v = fs.shape.limit_at(y);
  TransformResult r = TransformResult::from_exact(ExactValue::pi_multiple(Rational(2) * v.re), "delta",
                                                  "2*pi * lim f(-i d/dy) delta(y), ramp anti-derivatives");
  if (!v.im.is_zero()) {
    r.exact_imag = ExactValue::pi_multiple(Rational(2) * v.im);
    r.approx_imag = r.exact_imag->numeric();
  }
  return r;
}

// ---------------------------------------------------------------------------
// Green route: numerator(x) / prod (x^2 + a_k^2)

inline TransformResult integrate_rational_trig(const ExprPtr& numerator, const std::vector<Rational>& rates,
                                               const Rational& y = 0) {
  if (rates.empty()) throw UnsupportedFamily("rational_trig needs at least one factor x^2 + a^2");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (rates[i].sign() <= 0) throw DomainError("rates must be positive");
    for (std::size_t j = 0; j < i; ++j)
      if (rates[i] == rates[j]) throw UnsupportedFamily("repeated factors unsupported (rate " + rates[i].to_string() + ")");
  }
  ExpPoly num = exp_poly_of(numerator);
  for (const auto& [k, c] : num.terms()) {
    if (k.power != 0)
      throw UnsupportedFamily("numerator term with x^" + std::to_string(k.power) + " is outside the translation family");
    if (!k.kappa_re.is_zero())
      throw UnsupportedFamily("numerator growth e^{" + k.kappa_re.to_string() + "x} exceeds the Green's function decay");
  }
  // 1/prod(-d^2 + a_k^2) = sum_k c_k / (-d^2 + a_k^2), c_k = 1/prod_{j != k} (a_j^2 - a_k^2)
  PiecewiseExp green;
  for (std::size_t k = 0; k < rates.size(); ++k) {
    Rational ck = 1;
    for (std::size_t j = 0; j < rates.size(); ++j)
      if (j != k) ck *= rates[j] * rates[j] - rates[k] * rates[k];
    green = green + ComplexRational(ck.inverse()) * green_function(rates[k]);
  }
  OperatorWord word = word_of(num, Variant::imaginary_fourier);
  PiecewiseExp acted;
  for (const auto& [key, c] : word.raw()) acted = acted + c * green.translated(key.first);
  ExactValue v = acted.exact_at(y, true) * Rational(2);
  auto r = TransformResult::from_exact(v, "green", "2*pi * lim g(-i d/dy) G(y), G = Green's function of the denominator");
  std::string rs;
  for (const auto& a : rates) rs += (rs.empty() ? "" : ", ") + a.to_string();
  r.diagnostics.notes.push_back("partial fractions over rates {" + rs + "}");
  return r;
}

// ---------------------------------------------------------------------------
// Log-chain routes: f(-d) 1/y (Laplace) and f(d) 1/y (negative half-line)

namespace detail {

/// sum over word terms of c * H^{(n+N)}(y + b) with H = (N-th anti-derivative
/// of 1/y) + perturbation. Terms at y + b = 0 use the limit y -> 0+.
inline ExactValue log_chain_action(const OperatorWord& word, const Rational& y,
                                   const std::vector<Rational>& perturbation) {
  int depth = std::max(0, -word.min_power());
  LogChain h = one_over_y_chain(-depth);
  if (!perturbation.empty()) {
    if (static_cast<int>(GaussianChain::trimmed(perturbation).size()) > depth)
      throw DomainError("perturbation degree must be below " + std::to_string(depth));
    for (std::size_t i = 0; i < perturbation.size(); ++i) h.add(perturbation[i], static_cast<int>(i), false);
  }
  std::vector<LogChain> derivs{h};
  ExactValue total;
  for (const auto& [key, c] : word.raw()) {
    auto [b, n] = key;
    if (!c.is_real()) throw DomainError("complex coefficient in a real-kernel word");
    auto j = static_cast<std::size_t>(n + depth);
    while (derivs.size() <= j) derivs.push_back(derivs.back().derivative());
    Rational t = y + b;
    if (t.sign() < 0)
      throw DomainError("kernel argument y + b = " + t.to_string() + " < 0 for term " + term_text(c, b, n));
    ExactValue v = t.is_zero() ? derivs[j].limit_at_zero_plus() : derivs[j].exact_at(t);
    total += v * c.re;
  }
  return total;
}

}  // namespace detail

inline TransformResult laplace_formal(const ExprPtr& ast, const Rational& y,
                                      const std::vector<Rational>& perturbation = {}) {
  ExpPoly f = exp_poly_of(ast);
  if (!f.is_entire()) throw UnsupportedFamily("'" + to_string(*ast) + "' has a pole at 0");
  OperatorWord w = word_of(f, Variant::real_laplace);
  auto r = TransformResult::from_exact(detail::log_chain_action(w, y, perturbation), "laplace-formal",
                                       "f(-d/dy) 1/y, translations acting on the 1/y chain");
  return r;
}

enum class Side { positive, negative };

/// Regularized kernel K(t) = (1 - e^{-a t})/t and its derivatives (n > 0) or
/// anti-derivatives vanishing at 0 (n < 0), as an exact Taylor sum.
inline Rational regularized_kernel(int n, const Rational& t, const Rational& a) {
  // k_m m!/(m-n)! t^(m-n) = (-1)^m a^(m+1) t^(m-n) / ((m+1) (m-n)!)
  double reach = std::abs(a.to_double() * t.to_double());
  int m_max = static_cast<int>(std::ceil(3 * reach)) + 80 + std::abs(n);
  Rational sum;
  int m = std::max(0, n);
  Rational apow = a.pow(m + 1);
  Rational tpow = t.pow(m - n);
  Rational inv_fact = Rational(factorial(static_cast<unsigned>(m - n))).inverse();
  for (; m <= m_max; ++m) {
    Rational term = apow * tpow * inv_fact / Rational(m + 1);
    if (m % 2) sum -= term;
    else sum += term;
    apow *= a;
    tpow *= t;
    inv_fact /= Rational(m - n + 1);
  }
  return sum;
}

inline TransformResult laplace_regularized(const ExprPtr& ast, const Rational& y,
                                           const Rational& a = Rational(kDefaultRegularization), Side side = Side::positive) {
  if (a.sign() <= 0) throw DomainError("regularization parameter must be positive");
  ExpPoly f = exp_poly_of(ast);
  OperatorWord w = word_of(f, side == Side::positive ? Variant::real_laplace : Variant::negative_half_line);
  Rational total;
  for (const auto& [key, c] : w.raw()) {
    if (!c.is_real()) throw DomainError("complex coefficient in a real-kernel word");
    total += c.re * regularized_kernel(key.second, y + key.first, a);
  }
  TransformResult r;
  r.approx = total.to_real();
  r.method = "laplace-regularized";
  r.formula = "f(-d/dy) (1 - e^{-a y})/y";
  r.diagnostics.regularization = a.to_double();
  r.diagnostics.verdict = "regularized";
  return r;
}

/// int_0^inf f (positive) or int_-inf^0 f (negative) through the 1/y chain at y -> 0+.
inline TransformResult integrate_half_line(const ExprPtr& ast, Side side = Side::positive,
                                           const std::vector<Rational>& perturbation = {}) {
  ExpPoly f = exp_poly_of(ast);
  if (f.is_zero()) return TransformResult::from_exact(ExactValue{}, "half-line", "zero integrand");
  if (!f.is_entire()) throw DomainError("divergent: '" + to_string(*ast) + "' has a non-integrable pole at 0");
  OperatorWord w = word_of(f, side == Side::positive ? Variant::real_laplace : Variant::negative_half_line);
  for (const auto& [key, c] : w.raw()) {
    auto [b, n] = key;
    if (b.sign() < 0)
      throw DomainError("divergent: term " + detail::term_text(c, b, n) + " grows like e^{" + (-b).to_string() +
                        "|x|} on the half-line");
    if (b.is_zero() && n >= -1)
      throw DomainError("divergent: term " + detail::term_text(c, b, n) + " decays no faster than 1/x");
  }
  TransformResult r;
  try {
    r = TransformResult::from_exact(detail::log_chain_action(w, 0, perturbation), "half-line",
                                    side == Side::positive ? "lim_{y->0+} f(-d/dy) 1/y" : "lim_{y->0+} f(d/dy) 1/y");
  } catch (const DomainError& e) {
    r = laplace_regularized(ast, 0, Rational(kDefaultRegularization), side);
    r.method = "half-line-regularized";
    r.formula = "lim_{y->0} f(-d/dy) (1 - e^{-a y})/y";
    r.diagnostics.attempts.push_back(std::string("formal 1/y chain: ") + e.what());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Series routes with entire kernels

/// f(-i d/dy) 2a sinc(a y) = int_{-a}^{a} f(x) e^{ixy} dx, summed exactly over
/// the Taylor coefficients of f and of the kernel.
inline TransformResult fourier_regularized(const PowerSeries& f, const Rational& y, const Rational& a, double tol = 1e-15) {
  if (a.sign() <= 0) throw DomainError("regularization parameter must be positive");
  std::size_t n = f.coeffs.size();
  double reach = std::abs(a.to_double() * y.to_double());
  std::size_t m_max = n + static_cast<std::size_t>(std::ceil(3 * reach)) + 80;
  // g_m m! = (a^{m+1} - (-a)^{m+1}) i^m / (m+1): nonzero for even m only.
  auto g_fact = [&](std::size_t m) -> ComplexRational {
    if (m % 2) return 0;
    Rational v = Rational(2) * a.pow(static_cast<long long>(m + 1)) / Rational(static_cast<long long>(m + 1));
    return (m / 2) % 2 ? ComplexRational(-v) : ComplexRational(v);
  };
  ConvergenceMonitor monitor(tol, true);
  ComplexRational exact_sum;
  ComplexRational mi_pow = 1;
  std::size_t last_nonzero = 0;
  for (std::size_t k = 0; k < n; ++k, mi_pow = mi_pow * ComplexRational(0, -1)) {
    if (f.coeffs[k].is_zero()) continue;
    ComplexRational deriv;  // G^{(k)}(y)
    if (y.is_zero()) {
      deriv = g_fact(k);
    } else {
      // sum_{m>=k} g_m m!/(m-k)! y^(m-k)
      Rational ypow = 1, inv = 1;
      for (std::size_t m = k; m <= m_max; ++m) {
        if (m > k) {
          ypow *= y;
          inv /= Rational(static_cast<long long>(m - k));
        }
        ComplexRational g = g_fact(m);
        if (!g.is_zero()) deriv += g * ComplexRational(ypow * inv);
      }
    }
    ComplexRational term = f.coeffs[k] * mi_pow * deriv;
    exact_sum += term;
    last_nonzero = k;
    if (monitor.add(Complex::from(term), Complex::from(exact_sum))) break;
  }
  monitor.finish(last_nonzero, f.order);
  TransformResult r;
  r.approx = exact_sum.re.to_real();
  r.approx_imag = exact_sum.im.to_real();
  r.method = "series-regularized";
  r.formula = "f(-i d/dy) 2a sinc(a y)";
  r.diagnostics.truncation = f.order;
  r.diagnostics.regularization = a.to_double();
  r.diagnostics.verdict = verdict_name(monitor.verdict());
  return r;
}

inline TransformResult fourier_regularized(const ExprPtr& ast, const Rational& y, const Rational& a,
                                           std::size_t order = kDefaultTruncation) {
  return fourier_regularized(taylor_of(ast, order), y, a);
}

/// Normalized Taylor data phi_k = phi^{(k)}(0)/k! of a test profile.
struct TaylorProfile {
  std::vector<ComplexRational> normalized;
  std::string decay;

  static TaylorProfile from_series(const PowerSeries& s, std::string decay = "analytic") {
    return {s.coeffs, std::move(decay)};
  }
};

struct PairingResult {
  Complex value;
  Verdict verdict = Verdict::inconclusive;
  std::size_t terms = 0;
  Real last_term = 0;
};

/// sqrt(2 pi) sum_k (-i)^k a_k phi^{(k)}(0), k <= N.
inline PairingResult pw_pairing(const PowerSeries& f, const TaylorProfile& phi, std::size_t order, double tol = 1e-15) {
  std::size_t n = std::min({order + 1, f.coeffs.size(), phi.normalized.size()});
  ConvergenceMonitor monitor(tol);
  Real root = boost::multiprecision::sqrt(2 * real_pi());
  ComplexRational mi_pow = 1;
  BigInt fact = 1;
  std::size_t last_nonzero = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      mi_pow = mi_pow * ComplexRational(0, -1);
      fact *= k;
    }
    ComplexRational term = mi_pow * f.coeffs[k] * phi.normalized[k] * ComplexRational(Rational(fact));
    if (term.is_zero()) continue;
    last_nonzero = k;
    if (monitor.add(Complex::from(term) * root)) break;
  }
  monitor.finish(last_nonzero, n - 1);
  auto s = monitor.result();
  return {s.value, s.verdict, s.terms, s.last_term};
}

// ---------------------------------------------------------------------------
// Real-line dispatcher

struct IntegrateOptions {
  std::size_t truncation = kDefaultTruncation;
  Rational regularization = kDefaultRegularization;
};

inline TransformResult integrate_real_line(const ExprPtr& ast, const IntegrateOptions& opt = {}) {
  RouteClass rc = classify(ast);
  std::vector<std::string> attempts;
  auto finish = [&](TransformResult r) {
    r.diagnostics.attempts.insert(r.diagnostics.attempts.begin(), attempts.begin(), attempts.end());
    r.diagnostics.notes.insert(r.diagnostics.notes.begin(), std::string("class: ") + route_tag_name(rc.tag));
    return r;
  };

  // 1. ramp route
  try {
    ExpPoly f = exp_poly_of(ast);
    if (!f.is_zero() && detail::highest_power(f) >= 0)
      throw UnsupportedFamily("needs every power of x negative for integrability on R");
    return finish(delta_route_at(ast, 0));
  } catch (const Error& e) {
    attempts.push_back(std::string("delta: ") + e.what());
  }

  // 2. Green route
  if (rc.tag == RouteTag::rational_trig) {
    try {
      auto r = integrate_rational_trig(rc.numerator, rc.rates);
      if (rc.scale != Rational(1)) {
        r.exact = *r.exact * rc.scale;
        r.approx = r.exact->numeric();
      }
      return finish(r);
    } catch (const Error& e) {
      attempts.push_back(std::string("green: ") + e.what());
    }
  } else {
    attempts.push_back("green: " + (rc.reasons.size() > 2 ? rc.reasons[2] : std::string("not a rational_trig integrand")));
  }

  // 3. Gaussian route
  if (rc.tag == RouteTag::gaussian_sinc) {
    auto r = sinc_power_gaussian(rc.power);
    if (rc.scale != Rational(1)) {
      r.exact = *r.exact * rc.scale;
      r.approx = r.exact->numeric();
    }
    return finish(r);
  }
  attempts.push_back("gaussian: not sinc(x)^n * exp(-x^2/2)");

  // 4. half-line sum
  try {
    auto pos = integrate_half_line(ast, Side::positive);
    auto neg = integrate_half_line(ast, Side::negative);
    if (!pos.exact || !neg.exact) throw NonConvergence("half-line pieces are not exact");
    auto r = TransformResult::from_exact(*pos.exact + *neg.exact, "half-line-sum",
                                         "lim_{y->0+} (f(d/dy) + f(-d/dy)) 1/y");
    return finish(r);
  } catch (const Error& e) {
    attempts.push_back(std::string("half-line-sum: ") + e.what());
    // An exponential polynomial missed by the ramp route has no convergent integral over R.
    if (rc.tag == RouteTag::exp_poly) {
      std::string msg = "not integrable on R: '" + to_string(*ast) + "'";
      for (const auto& a : attempts) msg += "\n  " + a;
      throw DomainError(msg);
    }
  }

  if (rc.tag == RouteTag::unsupported) {
    std::vector<std::string> reasons = rc.reasons;
    reasons.insert(reasons.end(), attempts.begin(), attempts.end());
    throw UnsupportedFamily(reasons);
  }

  // 5. series fallback. The kernel's Taylor terms peak near k ~ e a^2, so for each a the
  // truncation doubles until the sum settles; a doubles up to opt.regularization until
  // consecutive limits agree.
  TransformResult r;
  std::optional<Real> previous;
  bool settled = false;
  for (Rational a = std::min(opt.regularization, Rational(5)); !settled; a = std::min(a * Rational(2), opt.regularization)) {
    for (std::size_t n = opt.truncation;; n *= 2) {
      r = fourier_regularized(ast, 0, a, n);
      if (r.diagnostics.verdict == "converged" || n >= kMaxFallbackTruncation) break;
      attempts.push_back("series-fallback: " + r.diagnostics.verdict + " at a = " + a.to_string() +
                         ", N = " + std::to_string(n));
    }
    if (r.diagnostics.verdict != "converged") break;
    using boost::multiprecision::abs;
    settled = a == opt.regularization ||
              (previous && abs(r.approx - *previous) <= Real(1e-13) * std::max(Real(1), Real(abs(r.approx))));
    previous = r.approx;
  }
  r.method = "series-fallback";
  r.formula = "lim_{a->inf} f(-i d/dy) 2a sinc(a y) at y = 0";
  if (r.diagnostics.verdict != "converged") {
    std::string msg = "no route converged for '" + to_string(*ast) + "'";
    for (const auto& a : attempts) msg += "\n  " + a;
    throw NonConvergence(msg);
  }
  return finish(r);
}

/// int_a^b f dx through the Taylor series of f (kernel none).
inline TransformResult integrate_interval(const ExprPtr& ast, const Rational& a, const Rational& b,
                                          std::size_t order = kDefaultTruncation) {
  PowerSeries s = taylor_of(ast, order);
  SeriesSum sum = finite_interval_transform(s, a.to_real(), b.to_real(), 0, Kernel::none);
  TransformResult r;
  r.approx = sum.value.re;
  r.approx_imag = sum.value.im;
  r.method = "series";
  r.formula = "lim_{y->0} f(-i d/dy) (e^{iby} - e^{iay})/(iy) = sum a_k (b^{k+1} - a^{k+1})/(k+1)";
  r.diagnostics.truncation = order;
  r.diagnostics.verdict = verdict_name(sum.verdict);
  return r;
}

}  // namespace opcalc
