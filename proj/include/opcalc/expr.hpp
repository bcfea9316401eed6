#pragma once

// Integrand expression trees: construction, a Pratt parser, printing that
// re-parses to the same tree, and numeric evaluation.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "opcalc/error.hpp"
#include "opcalc/exact.hpp"

namespace opcalc {

enum class Func { sinc, sin, cos, exp, sqrt };

inline const char* func_name(Func f) {
  switch (f) {
    case Func::sinc: return "sinc";
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::sqrt: return "sqrt";
  }
  return "?";
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  struct Number { Rational value; };
  struct Var {};
  struct Pi {};
  struct Neg { ExprPtr arg; };
  struct Binary { char op; ExprPtr lhs, rhs; };  // one of + - * /
  struct Pow { ExprPtr base; long long exponent; };
  struct Call { Func func; ExprPtr arg; };

  std::variant<Number, Var, Pi, Neg, Binary, Pow, Call> node;

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }
};

namespace ex {
inline ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }
inline ExprPtr num(Rational v) { return make({Expr::Number{std::move(v)}}); }
inline ExprPtr x() { return make({Expr::Var{}}); }
inline ExprPtr pi() { return make({Expr::Pi{}}); }
inline ExprPtr neg(ExprPtr a) { return make({Expr::Neg{std::move(a)}}); }
inline ExprPtr bin(char op, ExprPtr a, ExprPtr b) { return make({Expr::Binary{op, std::move(a), std::move(b)}}); }
inline ExprPtr add(ExprPtr a, ExprPtr b) { return bin('+', std::move(a), std::move(b)); }
inline ExprPtr sub(ExprPtr a, ExprPtr b) { return bin('-', std::move(a), std::move(b)); }
inline ExprPtr mul(ExprPtr a, ExprPtr b) { return bin('*', std::move(a), std::move(b)); }
inline ExprPtr div(ExprPtr a, ExprPtr b) { return bin('/', std::move(a), std::move(b)); }
inline ExprPtr pow(ExprPtr b, long long e) { return make({Expr::Pow{std::move(b), e}}); }
inline ExprPtr call(Func f, ExprPtr a) { return make({Expr::Call{f, std::move(a)}}); }
inline ExprPtr sinc(ExprPtr a) { return call(Func::sinc, std::move(a)); }
inline ExprPtr sin(ExprPtr a) { return call(Func::sin, std::move(a)); }
inline ExprPtr cos(ExprPtr a) { return call(Func::cos, std::move(a)); }
inline ExprPtr exp(ExprPtr a) { return call(Func::exp, std::move(a)); }
}  // namespace ex

inline bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto p = a.as<Expr::Number>()) return p->value == b.as<Expr::Number>()->value;
  if (a.as<Expr::Var>() || a.as<Expr::Pi>()) return true;
  if (auto p = a.as<Expr::Neg>()) return structurally_equal(*p->arg, *b.as<Expr::Neg>()->arg);
  if (auto p = a.as<Expr::Binary>()) {
    auto q = b.as<Expr::Binary>();
    return p->op == q->op && structurally_equal(*p->lhs, *q->lhs) && structurally_equal(*p->rhs, *q->rhs);
  }
  if (auto p = a.as<Expr::Pow>()) {
    auto q = b.as<Expr::Pow>();
    return p->exponent == q->exponent && structurally_equal(*p->base, *q->base);
  }
  auto p = a.as<Expr::Call>();
  auto q = b.as<Expr::Call>();
  return p->func == q->func && structurally_equal(*p->arg, *q->arg);
}

/// Exact value of an x-free, pi-free, function-free subtree.
inline std::optional<Rational> constant_value(const Expr& e) {
  if (auto p = e.as<Expr::Number>()) return p->value;
  if (auto p = e.as<Expr::Neg>()) {
    auto v = constant_value(*p->arg);
    if (v) return -*v;
    return std::nullopt;
  }
  if (auto p = e.as<Expr::Binary>()) {
    auto l = constant_value(*p->lhs);
    auto r = constant_value(*p->rhs);
    if (!l || !r) return std::nullopt;
    switch (p->op) {
      case '+': return *l + *r;
      case '-': return *l - *r;
      case '*': return *l * *r;
      case '/':
        if (r->is_zero()) return std::nullopt;
        return *l / *r;
    }
  }
  if (auto p = e.as<Expr::Pow>()) {
    auto b = constant_value(*p->base);
    if (!b || (b->is_zero() && p->exponent < 0)) return std::nullopt;
    return b->pow(p->exponent);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {
// Finite decimal expansion when the denominator is 2^a 5^b; parsed decimals
// print back as decimals.
inline std::optional<std::string> decimal_string(const Rational& v) {
  BigInt den = v.denominator();
  unsigned twos = 0, fives = 0;
  while (den % 2 == 0) { den /= 2; ++twos; }
  while (den % 5 == 0) { den /= 5; ++fives; }
  if (den != 1) return std::nullopt;
  unsigned digits = std::max(twos, fives);
  BigInt scaled = boost::multiprecision::abs(v.numerator()) *
                  boost::multiprecision::pow(BigInt(10), digits) / v.denominator();
  std::string s = scaled.str();
  if (s.size() <= digits) s = std::string(digits - s.size() + 1, '0') + s;
  if (digits > 0) s.insert(s.size() - digits, ".");
  return (v.sign() < 0 ? "-" : "") + s;
}

// Binding power of the node's outermost operator.
inline int print_precedence(const Expr& e) {
  if (auto b = e.as<Expr::Binary>()) return (b->op == '+' || b->op == '-') ? 10 : 20;
  if (e.as<Expr::Neg>()) return 30;
  if (e.as<Expr::Pow>()) return 40;
  if (auto n = e.as<Expr::Number>()) {
    if (n->value.sign() < 0) return 30;
    if (!n->value.is_integer() && !decimal_string(n->value)) return 20;
  }
  return 100;
}
}  // namespace detail

inline std::string to_string(const Expr& e) {
  using detail::print_precedence;
  auto wrap = [](const Expr& sub, int min_prec) {
    std::string s = to_string(sub);
    return print_precedence(sub) < min_prec ? "(" + s + ")" : s;
  };
  if (auto p = e.as<Expr::Number>()) {
    if (auto d = detail::decimal_string(p->value)) return *d;
    return p->value.to_string();
  }
  if (e.as<Expr::Var>()) return "x";
  if (e.as<Expr::Pi>()) return "pi";
  if (auto p = e.as<Expr::Neg>()) return "-" + wrap(*p->arg, 31);
  if (auto p = e.as<Expr::Binary>()) {
    int prec = (p->op == '+' || p->op == '-') ? 10 : 20;
    // Left-associative: the right operand needs strictly higher precedence.
    return wrap(*p->lhs, prec) + " " + p->op + " " + wrap(*p->rhs, prec + 1);
  }
  if (auto p = e.as<Expr::Pow>()) {
    std::string exponent = p->exponent < 0 ? "(" + std::to_string(p->exponent) + ")" : std::to_string(p->exponent);
    return wrap(*p->base, 41) + "^" + exponent;
  }
  auto c = e.as<Expr::Call>();
  return std::string(func_name(c->func)) + "(" + to_string(*c->arg) + ")";
}

// ---------------------------------------------------------------------------
// Parsing
//
// Precedence (loosest to tightest): + -, * /, unary -, ^ (right-assoc).

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprPtr parse() {
    ExprPtr e = expression(0);
    skip_space();
    if (pos_ != text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  void expect(char c) {
    if (peek() != c) {
      throw ParseError(std::string("expected '") + c + "'" +
                           (pos_ < text_.size() ? std::string(", found '") + text_[pos_] + "'" : " at end of input"),
                       pos_);
    }
    ++pos_;
  }

  static int infix_power(char op) {
    switch (op) {
      case '+': case '-': return 10;
      case '*': case '/': return 20;
      case '^': return 40;
      default: return -1;
    }
  }

  ExprPtr expression(int min_power) {
    ExprPtr lhs = prefix();
    for (;;) {
      char op = peek();
      int power = infix_power(op);
      if (power < 0 || power <= min_power) break;
      std::size_t op_pos = pos_;
      ++pos_;
      if (op == '^') {
        ExprPtr rhs = expression(power - 1);  // right-associative
        auto value = constant_value(*rhs);
        if (!value || !value->is_integer())
          throw ParseError("exponent must be an integer constant", op_pos);
        lhs = ex::pow(std::move(lhs), static_cast<long long>(value->numerator()));
      } else {
        lhs = ex::bin(op, std::move(lhs), expression(power));
      }
    }
    return lhs;
  }

  ExprPtr prefix() {
    char c = peek();
    if (c == '\0') throw ParseError("unexpected end of input", pos_);
    if (c == '-') {
      ++pos_;
      return ex::neg(expression(30));
    }
    if (c == '(') {
      ++pos_;
      ExprPtr inner = expression(0);
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  ExprPtr number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    std::string_view lit = text_.substr(start, pos_ - start);
    if (lit == "." || lit.find('.') != lit.rfind('.')) throw ParseError("malformed number", start);
    return ex::num(Rational::parse(lit));
  }

  ExprPtr identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (name == "x") return ex::x();
    if (name == "pi") return ex::pi();
    static const std::pair<const char*, Func> funcs[] = {
        {"sinc", Func::sinc}, {"sin", Func::sin}, {"cos", Func::cos}, {"exp", Func::exp}, {"sqrt", Func::sqrt}};
    for (const auto& [fname, f] : funcs) {
      if (name == fname) {
        expect('(');
        ExprPtr arg = expression(0);
        expect(')');
        return ex::call(f, std::move(arg));
      }
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline ExprPtr parse_expression(std::string_view text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Numeric evaluation

template <class T>
T evaluate(const Expr& e, const T& x) {
  using std::cos;
  using std::exp;
  using std::sin;
  using std::sqrt;
  if (auto p = e.as<Expr::Number>()) {
    if constexpr (std::is_same_v<T, Real>) return p->value.to_real();
    else return static_cast<T>(p->value.to_long_double());
  }
  if (e.as<Expr::Var>()) return x;
  if (e.as<Expr::Pi>()) {
    if constexpr (std::is_same_v<T, Real>) return real_pi();
    else return static_cast<T>(3.141592653589793238462643383279502884L);
  }
  if (auto p = e.as<Expr::Neg>()) return -evaluate(*p->arg, x);
  if (auto p = e.as<Expr::Binary>()) {
    T l = evaluate(*p->lhs, x), r = evaluate(*p->rhs, x);
    switch (p->op) {
      case '+': return l + r;
      case '-': return l - r;
      case '*': return l * r;
      default: return l / r;
    }
  }
  if (auto p = e.as<Expr::Pow>()) {
    T b = evaluate(*p->base, x);
    T acc = 1;
    long long n = p->exponent < 0 ? -p->exponent : p->exponent;
    for (long long k = 0; k < n; ++k) acc *= b;
    return p->exponent < 0 ? T(1) / acc : acc;
  }
  auto c = e.as<Expr::Call>();
  T a = evaluate(*c->arg, x);
  switch (c->func) {
    case Func::sinc: {
      if (a == 0) return T(1);
      T s = sin(a);
      return s / a;
    }
    case Func::sin: return sin(a);
    case Func::cos: return cos(a);
    case Func::exp: return exp(a);
    case Func::sqrt: return sqrt(a);
  }
  return T(0);
}

}  // namespace opcalc
