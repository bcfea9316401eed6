#pragma once

// Structural classification of integrands into the solvable families.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "opcalc/error.hpp"
#include "opcalc/exact.hpp"
#include "opcalc/expr.hpp"
#include "opcalc/operator.hpp"
#include "opcalc/series.hpp"

namespace opcalc {

enum class RouteTag { sinc_cos_product, gaussian_sinc, rational_trig, exp_poly, series_only, unsupported };

inline const char* route_tag_name(RouteTag t) {
  switch (t) {
    case RouteTag::sinc_cos_product: return "sinc_cos_product";
    case RouteTag::gaussian_sinc: return "gaussian_sinc";
    case RouteTag::rational_trig: return "rational_trig";
    case RouteTag::exp_poly: return "exp_poly";
    case RouteTag::series_only: return "series_only";
    case RouteTag::unsupported: return "unsupported";
  }
  return "?";
}

struct RouteClass {
  RouteTag tag = RouteTag::unsupported;
  Rational scale = 1;                 // constant prefactor
  std::vector<Rational> sinc_rates;   // sinc_cos_product: all sinc rates, outer rate removed
  std::vector<Rational> cos_rates;
  Rational outer_rate = 1;            // largest sinc rate
  unsigned power = 0;                 // gaussian_sinc: n in sinc(x)^n e^{-x^2/2}
  std::vector<Rational> rates;        // rational_trig: a_k with factors x^2 + a_k^2
  ExprPtr numerator;                  // rational_trig
  std::vector<std::string> reasons;   // why earlier families did not match
};

namespace detail {

struct Factor {
  enum Kind { sinc, cos, gaussian, constant } kind;
  Rational value;  // rate or constant
};

/// Flattens a product of supported multiplicative factors; nullopt if any
/// factor falls outside the family. `why` receives the first offender.
inline std::optional<std::vector<Factor>> product_factors(const Expr& e, std::string& why) {
  std::vector<Factor> out;
  auto self = [&](const Expr& sub) { return product_factors(sub, why); };
  if (auto p = e.as<Expr::Number>()) return std::vector<Factor>{{Factor::constant, p->value}};
  if (auto p = e.as<Expr::Neg>()) {
    auto r = self(*p->arg);
    if (r) r->push_back({Factor::constant, -1});
    return r;
  }
  if (auto p = e.as<Expr::Binary>()) {
    if (p->op == '*') {
      auto a = self(*p->lhs);
      if (!a) return std::nullopt;
      auto b = self(*p->rhs);
      if (!b) return std::nullopt;
      a->insert(a->end(), b->begin(), b->end());
      return a;
    }
    if (p->op == '/') {
      auto c = constant_value(*p->rhs);
      if (!c || c->is_zero()) {
        why = "division by non-constant '" + to_string(*p->rhs) + "'";
        return std::nullopt;
      }
      auto a = self(*p->lhs);
      if (a) a->push_back({Factor::constant, c->inverse()});
      return a;
    }
    why = "sum '" + to_string(e) + "' is not a product of factors";
    return std::nullopt;
  }
  if (auto p = e.as<Expr::Pow>()) {
    if (p->exponent < 0) {
      why = "negative power '" + to_string(e) + "'";
      return std::nullopt;
    }
    auto b = self(*p->base);
    if (!b) return std::nullopt;
    for (long long k = 0; k < p->exponent; ++k) out.insert(out.end(), b->begin(), b->end());
    return out;
  }
  if (auto p = e.as<Expr::Call>()) {
    if (p->func == Func::exp) {
      auto poly = polynomial_of(*p->arg);
      if (poly && poly->size() == 3 && (*poly)[0].is_zero() && (*poly)[1].is_zero() && (*poly)[2] == Rational(-1, 2))
        return std::vector<Factor>{{Factor::gaussian, 0}};
      why = "exp factor '" + to_string(e) + "' is not exp(-x^2/2)";
      return std::nullopt;
    }
    if (p->func == Func::sinc || p->func == Func::cos) {
      auto rate = linear_rate(*p->arg);
      if (!rate) {
        why = "argument of '" + to_string(e) + "' is not a*x";
        return std::nullopt;
      }
      if (rate->is_zero()) return std::vector<Factor>{{Factor::constant, 1}};
      return std::vector<Factor>{{p->func == Func::sinc ? Factor::sinc : Factor::cos, rate->abs()}};
    }
    why = "factor '" + to_string(e) + "' is not sinc, cos or a Gaussian";
    return std::nullopt;
  }
  if (e.as<Expr::Var>()) why = "polynomial factor x";
  else why = "factor '" + to_string(e) + "' is not supported";
  return std::nullopt;
}

inline std::optional<Rational> perfect_square_root(const Rational& r) {
  if (r.sign() <= 0) return std::nullopt;
  BigInt n = r.numerator(), d = r.denominator();
  BigInt rn = boost::multiprecision::sqrt(n), rd = boost::multiprecision::sqrt(d);
  if (rn * rn != n || rd * rd != d) return std::nullopt;
  return Rational(rn, rd);
}

/// Denominator as c * prod (x^2 + a_k^2); returns c and the a_k.
inline std::optional<std::pair<Rational, std::vector<Rational>>> quadratic_factors(const Expr& e, std::string& why) {
  if (auto p = e.as<Expr::Binary>(); p && p->op == '*') {
    auto a = quadratic_factors(*p->lhs, why);
    if (!a) return std::nullopt;
    auto b = quadratic_factors(*p->rhs, why);
    if (!b) return std::nullopt;
    a->first *= b->first;
    a->second.insert(a->second.end(), b->second.begin(), b->second.end());
    return a;
  }
  if (auto p = e.as<Expr::Pow>(); p && p->exponent > 1) {
    auto b = quadratic_factors(*p->base, why);
    if (b && !b->second.empty()) {
      why = "repeated factors unsupported: '" + to_string(e) + "'";
      return std::nullopt;
    }
    if (b) b->first = b->first.pow(p->exponent);
    return b;
  }
  auto poly = polynomial_of(e);
  if (!poly) {
    why = "denominator factor '" + to_string(e) + "' is not polynomial";
    return std::nullopt;
  }
  auto& c = *poly;
  while (!c.empty() && c.back().is_zero()) c.pop_back();
  if (c.size() == 1) return std::make_pair(c[0], std::vector<Rational>{});
  if (c.size() == 3 && c[1].is_zero()) {
    auto root = perfect_square_root(c[0] / c[2]);
    if (root) return std::make_pair(c[2], std::vector<Rational>{*root});
    why = "factor '" + to_string(e) + "' is not x^2 + a^2 with rational a";
    return std::nullopt;
  }
  why = "denominator factor '" + to_string(e) + "' is not of the form x^2 + a^2";
  return std::nullopt;
}

}  // namespace detail

inline RouteClass classify(const ExprPtr& ast) {
  RouteClass rc;
  std::string why;

  if (auto factors = detail::product_factors(*ast, why)) {
    Rational scale = 1;
    std::vector<Rational> sincs, coss;
    unsigned gaussians = 0;
    for (const auto& f : *factors) {
      switch (f.kind) {
        case detail::Factor::constant: scale *= f.value; break;
        case detail::Factor::sinc: sincs.push_back(f.value); break;
        case detail::Factor::cos: coss.push_back(f.value); break;
        case detail::Factor::gaussian: ++gaussians; break;
      }
    }
    if (gaussians == 0 && !sincs.empty()) {
      auto outer = std::max_element(sincs.begin(), sincs.end());
      rc.tag = RouteTag::sinc_cos_product;
      rc.scale = scale;
      rc.outer_rate = *outer;
      sincs.erase(outer);
      rc.sinc_rates = sincs;
      rc.cos_rates = coss;
      return rc;
    }
    if (gaussians == 0) rc.reasons.push_back("sinc_cos_product: no sinc factor");
    if (gaussians == 1 && coss.empty() &&
        std::all_of(sincs.begin(), sincs.end(), [](const Rational& r) { return r == Rational(1); })) {
      rc.tag = RouteTag::gaussian_sinc;
      rc.scale = scale;
      rc.power = static_cast<unsigned>(sincs.size());
      return rc;
    }
    rc.reasons.push_back("gaussian_sinc: needs sinc(x)^n * exp(-x^2/2) with unit sinc rate and no cos factors");
  } else {
    rc.reasons.push_back("sinc_cos_product: " + why);
    rc.reasons.push_back("gaussian_sinc: " + why);
  }

  why.clear();
  if (auto p = ast->as<Expr::Binary>(); p && p->op == '/') {
    auto den = detail::quadratic_factors(*p->rhs, why);
    if (den && !den->second.empty()) {
      auto rates = den->second;
      std::sort(rates.begin(), rates.end());
      if (std::adjacent_find(rates.begin(), rates.end()) != rates.end()) {
        why = "repeated factors unsupported";
      } else {
        try {
          auto num = exp_poly_of(p->lhs);
          for (const auto& [k, c] : num.terms()) {
            if (k.power != 0) throw UnsupportedFamily("numerator has a polynomial factor");
            if (!k.kappa_re.is_zero()) throw UnsupportedFamily("numerator grows exponentially");
          }
          rc.tag = RouteTag::rational_trig;
          rc.scale = den->first.inverse();
          rc.rates = den->second;
          rc.numerator = p->lhs;
          return rc;
        } catch (const UnsupportedFamily& e) {
          why = e.what();
        }
      }
    } else if (den) {
      why = "denominator is constant";
    }
  } else {
    why = "not a quotient";
  }
  rc.reasons.push_back("rational_trig: " + why);

  try {
    exp_poly_of(ast);
    rc.tag = RouteTag::exp_poly;
    return rc;
  } catch (const UnsupportedFamily& e) {
    rc.reasons.push_back(std::string("exp_poly: ") + e.what());
  }

  try {
    taylor_of(ast, 8);
    rc.tag = RouteTag::series_only;
    return rc;
  } catch (const UnsupportedFamily& e) {
    rc.reasons.push_back(std::string("series_only: ") + e.what());
  }
  rc.tag = RouteTag::unsupported;
  return rc;
}

}  // namespace opcalc
