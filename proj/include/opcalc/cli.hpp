#pragma once

// Command-line front end. run() takes the arguments after the program name
// and returns the exit status with captured output, so tests can drive it
// without spawning processes. Needs CLI11.hpp and json.hpp on the include path.

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "opcalc/classify.hpp"
#include "opcalc/error.hpp"
#include "opcalc/exact.hpp"
#include "opcalc/expr.hpp"
#include "opcalc/oracle.hpp"
#include "opcalc/result.hpp"
#include "opcalc/series.hpp"
#include "opcalc/sinc_lab.hpp"
#include "opcalc/transform.hpp"

namespace opcalc::cli {

enum ExitCode { ok = 0, failure = 1, parse_error = 2, unsupported = 3, non_convergence = 4 };

struct Outcome {
  int code = ok;
  std::string out;
  std::string err;
};

struct Flags {
  bool json = false;
  int precision = 15;
  std::size_t truncation = kDefaultTruncation;
  bool exact_only = false;
};

namespace detail {

// ---------------------------------------------------------------------------
// Oracle bridge: a plain long double integrand with a decay class read off the
// expression tree.

struct DecayScan {
  bool gaussian = false;
  bool exponential = false;
  std::optional<Rational> frequency;  // gcd of trig rates
};

inline void scan_decay(const Expr& e, DecayScan& s) {
  if (auto p = e.as<Expr::Neg>()) return scan_decay(*p->arg, s);
  if (auto p = e.as<Expr::Binary>()) {
    scan_decay(*p->lhs, s);
    return scan_decay(*p->rhs, s);
  }
  if (auto p = e.as<Expr::Pow>()) return scan_decay(*p->base, s);
  auto c = e.as<Expr::Call>();
  if (!c) return;
  scan_decay(*c->arg, s);
  if (c->func == Func::exp) {
    auto poly = opcalc::detail::polynomial_of(*c->arg);
    if (poly && poly->size() >= 3) s.gaussian = true;
    else if (poly && poly->size() == 2 && !(*poly)[1].is_zero()) s.exponential = true;
    return;
  }
  if (c->func == Func::sin || c->func == Func::cos || c->func == Func::sinc) {
    auto rate = opcalc::detail::linear_rate(*c->arg);
    if (rate && !rate->is_zero()) s.frequency = s.frequency ? rational_gcd(*s.frequency, rate->abs()) : rate->abs();
  }
}

inline Integrand oracle_integrand(const ExprPtr& ast) {
  return [ast](long double x) {
    long double v = evaluate<long double>(*ast, x);
    if (std::isfinite(v)) return v;
    // removable singularity: average the two sides
    long double h = 1e-7L * std::max<long double>(1, std::fabs(x));
    return (evaluate<long double>(*ast, x - h) + evaluate<long double>(*ast, x + h)) / 2;
  };
}

struct Bound {
  std::optional<Rational> value;  // nullopt: infinite
  int sign = 0;                   // -1 for -inf, +1 for +inf
};

inline QuadReport oracle_integral(const ExprPtr& ast, const Bound& lo, const Bound& hi, long double tol = 1e-10L) {
  Integrand f = oracle_integrand(ast);
  if (lo.value && hi.value) return quad_interval(f, lo.value->to_long_double(), hi.value->to_long_double(), tol, 8);
  if (lo.value) return quad_half_line(f, lo.value->to_long_double(), +1, tol);
  if (hi.value) return quad_half_line(f, hi.value->to_long_double(), -1, tol);
  DecayScan s;
  scan_decay(*ast, s);
  Decay d = s.gaussian ? Decay::gaussian : s.exponential ? Decay::exponential : Decay::oscillatory_algebraic;
  RealLineOptions opt;
  if (s.frequency) opt.base_frequency = static_cast<long double>(s.frequency->to_long_double());
  return quad_real_line(f, tol, d, opt);
}

// ---------------------------------------------------------------------------
// Formatting

inline std::string decimal(const Real& v, int digits) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

inline std::string decimal(long double v, int digits) {
  std::ostringstream os;
  os << std::setprecision(std::min(digits, std::numeric_limits<long double>::digits10)) << v;
  return os.str();
}

inline std::string exact_text(const TransformResult& r) {
  if (!r.exact) return {};
  std::string s = r.exact->to_string();
  if (r.exact_imag && !r.exact_imag->is_zero()) s = "(" + s + ") + i*(" + r.exact_imag->to_string() + ")";
  return s;
}

inline std::string approx_text(const TransformResult& r, int digits) {
  std::string s = decimal(r.approx, digits);
  if (r.approx_imag != 0) s += (r.approx_imag < 0 ? " - " : " + ") + decimal(boost::multiprecision::abs(r.approx_imag), digits) + "i";
  return s;
}

inline nlohmann::ordered_json to_json(const std::string& input, const TransformResult& r, const Flags& flags) {
  nlohmann::ordered_json j;
  j["input"] = input;
  j["method"] = r.method;
  j["paper_formula"] = r.formula;
  if (r.exact) j["exact"] = exact_text(r);
  else j["exact"] = nullptr;
  if (r.exact && !r.exact->pi_coefficient().is_zero() && !r.exact_imag) j["pi_coefficient"] = r.exact->pi_coefficient().to_string();
  else j["pi_coefficient"] = nullptr;
  j["approx"] = approx_text(r, flags.precision);
  j["diagnostics"]["truncation"] = r.diagnostics.truncation;
  if (r.diagnostics.regularization) j["diagnostics"]["regularization"] = *r.diagnostics.regularization;
  else j["diagnostics"]["regularization"] = nullptr;
  j["diagnostics"]["verdict"] = r.diagnostics.verdict;
  if (!r.diagnostics.attempts.empty()) j["diagnostics"]["attempts"] = r.diagnostics.attempts;
  if (!r.diagnostics.notes.empty()) j["diagnostics"]["notes"] = r.diagnostics.notes;
  return j;
}

inline std::string to_text(const std::string& input, const TransformResult& r, const Flags& flags) {
  std::ostringstream os;
  os << "input:    " << input << "\n";
  os << "method:   " << r.method << "\n";
  os << "formula:  " << r.formula << "\n";
  if (r.exact) os << "exact:    " << exact_text(r) << "\n";
  if (!flags.exact_only || !r.exact) os << "approx:   " << approx_text(r, flags.precision) << "\n";
  os << "verdict:  " << r.diagnostics.verdict << "\n";
  if (r.diagnostics.regularization) os << "a:        " << *r.diagnostics.regularization << "\n";
  for (const auto& a : r.diagnostics.attempts) os << "tried:    " << a << "\n";
  for (const auto& n : r.diagnostics.notes) os << "note:     " << n << "\n";
  return os.str();
}

inline std::string render(const std::string& input, const TransformResult& r, const Flags& flags,
                          const nlohmann::ordered_json& extra = {}) {
  if (!flags.json) return to_text(input, r, flags);
  auto j = to_json(input, r, flags);
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return j.dump(2) + "\n";
}

inline Rational parse_rational(const std::string& s) {
  try {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational::parse(s);
    return Rational::parse(s.substr(0, slash)) / Rational::parse(s.substr(slash + 1));
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("not a rational number: '" + s + "'", 0);
  }
}

inline std::vector<Rational> parse_rational_list(const std::string& s) {
  std::vector<Rational> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_rational(item));
  return out;
}

inline Bound parse_bound(const std::string& s) {
  if (s == "inf" || s == "+inf") return {std::nullopt, +1};
  if (s == "-inf") return {std::nullopt, -1};
  return {parse_rational(s), 0};
}

inline TransformResult oracle_result(const ExprPtr& ast, const Bound& lo, const Bound& hi) {
  QuadReport q = oracle_integral(ast, lo, hi);
  TransformResult r;
  r.approx = Real(q.value);
  r.method = "oracle";
  r.formula = "adaptive Gauss-Kronrod quadrature";
  r.diagnostics.verdict = q.converged ? "converged" : "inconclusive";
  std::ostringstream os;
  os << "error estimate " << static_cast<double>(q.error_estimate) << ", " << q.subdivisions << " subdivisions";
  if (q.truncation_radius > 0) os << ", radius " << static_cast<double>(q.truncation_radius);
  r.diagnostics.notes.push_back(os.str());
  if (!q.converged) throw NonConvergence("oracle quadrature did not reach tolerance (" + os.str() + ")");
  return r;
}

inline TransformResult scaled(TransformResult r, const Rational& s) {
  if (s == Rational(1)) return r;
  if (r.exact) {
    r.exact = *r.exact * s;
    r.approx = r.exact->numeric();
  } else {
    r.approx *= s.to_real();
    r.approx_imag *= s.to_real();
  }
  return r;
}

inline TransformResult integrate_command(const ExprPtr& ast, const std::optional<std::pair<Bound, Bound>>& interval,
                                         const std::string& method, const Flags& flags) {
  Bound lo{std::nullopt, -1}, hi{std::nullopt, +1};
  if (interval) std::tie(lo, hi) = *interval;
  if (lo.sign > 0 || hi.sign < 0) throw DomainError("interval bounds are reversed");
  if (method == "oracle") return oracle_result(ast, lo, hi);

  bool finite = lo.value && hi.value;
  bool real_line = !lo.value && !hi.value;
  if (finite) {
    if (method != "auto" && method != "series")
      throw UnsupportedFamily("method '" + method + "' does not apply to a finite interval; use series or oracle");
    auto r = integrate_interval(ast, *lo.value, *hi.value, flags.truncation);
    if (r.diagnostics.verdict == "diverged")
      throw NonConvergence("finite-interval series diverged at N = " + std::to_string(flags.truncation));
    return r;
  }
  if (!real_line) {
    const Rational& end = lo.value ? *lo.value : *hi.value;
    if (!end.is_zero())
      throw UnsupportedFamily("half-line routes start at 0; got endpoint " + end.to_string() + " (use --method oracle)");
    if (method != "auto" && method != "laplace")
      throw UnsupportedFamily("method '" + method + "' does not apply to a half-line; use laplace or oracle");
    return integrate_half_line(ast, lo.value ? Side::positive : Side::negative);
  }

  if (method == "auto") {
    IntegrateOptions opt;
    opt.truncation = flags.truncation;
    return integrate_real_line(ast, opt);
  }
  if (method == "delta") return delta_route_at(ast, 0);
  if (method == "green") {
    RouteClass rc = classify(ast);
    if (rc.tag != RouteTag::rational_trig) throw UnsupportedFamily(rc.reasons);
    return scaled(integrate_rational_trig(rc.numerator, rc.rates), rc.scale);
  }
  if (method == "laplace") {
    auto pos = integrate_half_line(ast, Side::positive);
    auto neg = integrate_half_line(ast, Side::negative);
    if (!pos.exact || !neg.exact) throw NonConvergence("half-line pieces are not exact");
    return TransformResult::from_exact(*pos.exact + *neg.exact, "half-line-sum", "lim_{y->0+} (f(d/dy) + f(-d/dy)) 1/y");
  }
  if (method == "series") {
    auto r = fourier_regularized(ast, 0, Rational(kDefaultRegularization), flags.truncation);
    if (r.diagnostics.verdict != "converged")
      throw NonConvergence("regularized series " + r.diagnostics.verdict + " at N = " + std::to_string(flags.truncation));
    return r;
  }
  throw DomainError("unknown method '" + method + "'");
}

inline TransformResult laplace_command(const ExprPtr& ast, const Rational& y, const std::optional<Rational>& a,
                                       const Flags& flags) {
  if (a) return laplace_regularized(ast, y, *a);
  try {
    return laplace_formal(ast, y);
  } catch (const UnsupportedFamily& e) {
    PowerSeries s = taylor_of(ast, flags.truncation);
    SeriesSum sum = laplace_laurent(s, y.to_real());
    TransformResult r;
    r.approx = sum.value.re;
    r.approx_imag = sum.value.im;
    r.method = "laplace-laurent";
    r.formula = "sum_k a_k k! / y^(k+1)";
    r.diagnostics.truncation = flags.truncation;
    r.diagnostics.verdict = verdict_name(sum.verdict);
    r.diagnostics.attempts.push_back(std::string("laplace-formal: ") + e.what());
    if (sum.verdict != Verdict::converged)
      throw NonConvergence("Laurent series " + r.diagnostics.verdict + " at y = " + y.to_string() +
                           " (majorant abscissa " + std::to_string(majorant_abscissa(s).abscissa) + ")");
    return r;
  }
}

/// int f(x) e^{ixy} dx.
inline TransformResult fourier_command(const ExprPtr& ast, const Rational& y, const Flags& flags) {
  RouteClass rc = classify(ast);
  std::vector<std::string> attempts;
  try {
    return delta_route_at(ast, y);
  } catch (const UnsupportedFamily& e) {
    attempts.push_back(std::string("delta: ") + e.what());
  }
  if (rc.tag == RouteTag::rational_trig) return scaled(integrate_rational_trig(rc.numerator, rc.rates, y), rc.scale);
  if (rc.tag == RouteTag::gaussian_sinc) return scaled(sinc_power_gaussian(rc.power, {}, y), rc.scale);
  if (rc.tag == RouteTag::unsupported) {
    auto reasons = rc.reasons;
    reasons.insert(reasons.end(), attempts.begin(), attempts.end());
    throw UnsupportedFamily(reasons);
  }
  auto r = fourier_regularized(ast, y, Rational(kDefaultRegularization), flags.truncation);
  r.diagnostics.attempts = attempts;
  if (r.diagnostics.verdict != "converged")
    throw NonConvergence("regularized Fourier series " + r.diagnostics.verdict + " at N = " +
                         std::to_string(flags.truncation));
  return r;
}

}  // namespace detail

inline Outcome run(std::vector<std::string> args) {
  Outcome outcome;
  std::ostringstream out, err;
  Flags flags;

  CLI::App app{"opcalc: integrals and transforms through operator calculus"};
  app.name("opcalc");
  app.require_subcommand(1);
  app.add_flag("--json", flags.json, "machine-readable output");
  app.add_option("--precision", flags.precision, "significant digits of the numeric shadow")->capture_default_str();
  app.add_option("--truncation", flags.truncation, "series truncation order N")->capture_default_str();
  app.add_flag("--exact", flags.exact_only, "suppress the float shadow when an exact value exists");

  std::string expr_text, method = "auto";
  std::vector<std::string> interval;
  auto* integrate = app.add_subcommand("integrate", "definite integral (real line by default)");
  integrate->add_option("expr", expr_text, "integrand in x")->required();
  integrate->add_option("--interval", interval, "bounds a b; inf and -inf allowed")->expected(2);
  integrate->add_option("--method", method, "route")
      ->check(CLI::IsMember({"auto", "series", "delta", "laplace", "green", "oracle"}));

  std::string at_text, reg_text;
  auto* laplace = app.add_subcommand("laplace", "Laplace transform at a point");
  laplace->add_option("expr", expr_text)->required();
  laplace->add_option("--at", at_text, "evaluation point y")->required();
  laplace->add_option("--regularized", reg_text, "use the regularized kernel with parameter a");

  auto* fourier = app.add_subcommand("fourier", "int f(x) e^{ixy} dx at a point");
  fourier->add_option("expr", expr_text)->required();
  fourier->add_option("--at", at_text, "evaluation point y")->required();

  unsigned borwein_n = 0;
  auto* borwein = app.add_subcommand("borwein", "int prod_{k<n} sinc(x/(2k+1)) dx");
  borwein->add_option("n", borwein_n)->required()->check(CLI::Range(1u, static_cast<unsigned>(kMaxTupleLength)));

  std::string sinc_list, cos_list, outer_text = "1";
  auto* lord = app.add_subcommand("lord", "sinc/cos product with an outer sinc(c x)");
  lord->add_option("--sinc", sinc_list, "comma-separated sinc rates");
  lord->add_option("--cos", cos_list, "comma-separated cos rates");
  lord->add_option("--outer", outer_text, "outer rate c")->capture_default_str();

  auto* compare = app.add_subcommand("compare", "engine against the numeric oracle");
  compare->add_option("expr", expr_text)->required();

  for (auto* sub : {integrate, laplace, fourier, borwein, lord, compare}) sub->fallthrough();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    outcome.out = app.help();
    return outcome;
  } catch (const CLI::ParseError& e) {
    outcome.code = parse_error;
    outcome.err = std::string("usage error: ") + e.what() + "\n";
    return outcome;
  }

  try {
    opcalc::detail::check_precision(flags.precision);
    if (integrate->parsed()) {
      auto ast = parse_expression(expr_text);
      std::optional<std::pair<detail::Bound, detail::Bound>> iv;
      if (!interval.empty()) iv = std::make_pair(detail::parse_bound(interval[0]), detail::parse_bound(interval[1]));
      out << detail::render(to_string(*ast), detail::integrate_command(ast, iv, method, flags), flags);
    } else if (laplace->parsed()) {
      auto ast = parse_expression(expr_text);
      std::optional<Rational> a;
      if (!reg_text.empty()) a = detail::parse_rational(reg_text);
      auto r = detail::laplace_command(ast, detail::parse_rational(at_text), a, flags);
      out << detail::render(to_string(*ast), r, flags);
    } else if (fourier->parsed()) {
      auto ast = parse_expression(expr_text);
      out << detail::render(to_string(*ast), detail::fourier_command(ast, detail::parse_rational(at_text), flags), flags);
    } else if (borwein->parsed()) {
      auto r = TransformResult::from_exact(borwein_exact(borwein_n), "borwein",
                                           "(2n-1)!! pi/2^(n-1) sum_gamma sign(gamma) R_{n-1}(beta_gamma), beta = sum gamma_k/(2k-1)");
      Rational deficit = borwein_deficit(borwein_n);
      nlohmann::ordered_json extra;
      extra["deficit"] = deficit.to_string();
      if (!flags.json && !deficit.is_zero()) r.diagnostics.notes.push_back("deficit: " + deficit.to_string());
      out << detail::render("borwein " + std::to_string(borwein_n), r, flags, extra);
    } else if (lord->parsed()) {
      SincProductSpec spec{detail::parse_rational_list(sinc_list), detail::parse_rational_list(cos_list),
                           detail::parse_rational(outer_text)};
      SincProductResult res = sinc_cos_product_integral(spec);
      auto r = TransformResult::from_exact(res.value, "lord",
                                           "pi/(2^{n+m} prod a') sum_gamma sign(gamma) [R_m(beta+1) - R_m(beta-1)]");
      r.diagnostics.notes = res.notes;
      nlohmann::ordered_json extra;
      extra["lord_condition"] = res.lord_condition;
      if (!flags.json) r.diagnostics.notes.push_back(std::string("condition c > sum of rates: ") + (res.lord_condition ? "holds" : "fails"));
      std::string label = "lord --sinc " + sinc_list + " --cos " + cos_list + " --outer " + outer_text;
      out << detail::render(label, r, flags, extra);
    } else if (compare->parsed()) {
      auto ast = parse_expression(expr_text);
      auto engine = std::async(std::launch::async, [&] {
        IntegrateOptions opt;
        opt.truncation = flags.truncation;
        return integrate_real_line(ast, opt);
      });
      auto oracle = std::async(std::launch::async, [&] {
        return detail::oracle_integral(ast, {std::nullopt, -1}, {std::nullopt, +1});
      });
      TransformResult r = engine.get();
      QuadReport q = oracle.get();
      long double diff = std::fabs(static_cast<long double>(r.approx) - q.value);
      nlohmann::ordered_json extra;
      extra["oracle"] = detail::decimal(q.value, flags.precision);
      extra["oracle_error_estimate"] = static_cast<double>(q.error_estimate);
      extra["difference"] = static_cast<double>(diff);
      if (flags.json) {
        out << detail::render(to_string(*ast), r, flags, extra);
      } else {
        out << detail::to_text(to_string(*ast), r, flags);
        out << "oracle:   " << detail::decimal(q.value, flags.precision) << " (error estimate "
            << static_cast<double>(q.error_estimate) << ")\n";
        out << "diff:     " << static_cast<double>(diff) << "\n";
      }
    }
  } catch (const ParseError& e) {
    outcome.code = parse_error;
    err << "parse error: " << e.what() << "\n";
  } catch (const UnsupportedFamily& e) {
    outcome.code = unsupported;
    err << "unsupported family: " << e.what() << "\n";
  } catch (const NonConvergence& e) {
    outcome.code = non_convergence;
    err << "no convergence: " << e.what() << "\n";
  } catch (const Error& e) {
    outcome.code = failure;
    err << "error: " << e.what() << "\n";
  }
  outcome.out += out.str();
  outcome.err += err.str();
  return outcome;
}

}  // namespace opcalc::cli
