#pragma once

// Exact scalars: arbitrary-precision integers and rationals, complex
// rationals, and ExactValue (rational + rational*pi + named transcendental
// residues with numeric shadows).

#include <boost/multiprecision/gmp.hpp>
#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <compare>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "opcalc/error.hpp"

namespace opcalc {

using BigInt = boost::multiprecision::mpz_int;
using Real = boost::multiprecision::mpfr_float_50;

inline Real real_pi() { return boost::math::constants::pi<Real>(); }

class Rational {
 public:
  Rational() = default;
  Rational(long long v) : v_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(BigInt num, BigInt den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    v_ = boost::multiprecision::mpq_rational(std::move(num), std::move(den));
  }
  explicit Rational(const BigInt& n) : v_(n) {}

  /// Parses "p", "p/q", or a decimal literal "12.375" (exactly, 10^d denominator).
  static Rational parse(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw DomainError("empty rational literal");
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '-' || s[0] == '+') {
      neg = s[0] == '-';
      i = 1;
    }
    std::string body = s.substr(i);
    Rational out;
    auto digits_only = [](const std::string& d) {
      return !d.empty() && d.find_first_not_of("0123456789") == std::string::npos;
    };
    // BigInt's string constructor reads a leading 0 as an octal prefix.
    auto decimal_int = [](const std::string& d) {
      std::size_t nz = d.find_first_not_of('0');
      return nz == std::string::npos ? BigInt(0) : BigInt(d.substr(nz));
    };
    if (auto slash = body.find('/'); slash != std::string::npos) {
      std::string n = body.substr(0, slash), d = body.substr(slash + 1);
      if (!digits_only(n) || !digits_only(d)) throw DomainError("malformed rational '" + s + "'");
      out = Rational(decimal_int(n), decimal_int(d));
    } else if (auto dot = body.find('.'); dot != std::string::npos) {
      std::string ip = body.substr(0, dot), fp = body.substr(dot + 1);
      if (ip.empty()) ip = "0";
      if (!digits_only(ip) || (!fp.empty() && !digits_only(fp)))
        throw DomainError("malformed decimal '" + s + "'");
      BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(fp.size()));
      out = Rational(decimal_int(ip) * scale + (fp.empty() ? BigInt(0) : decimal_int(fp)), scale);
    } else {
      if (!digits_only(body)) throw DomainError("malformed integer '" + s + "'");
      out = Rational(decimal_int(body));
    }
    return neg ? -out : out;
  }

  /// Nearest rational with denominator 10^digits; used to admit user floats.
  static Rational from_double(double v, int digits = 15) {
    std::ostringstream os;
    os.precision(digits);
    os << std::fixed << v;
    return parse(os.str());
  }

  BigInt numerator() const { return boost::multiprecision::numerator(v_); }
  BigInt denominator() const { return boost::multiprecision::denominator(v_); }
  int sign() const { return v_.sign(); }
  bool is_zero() const { return v_.is_zero(); }
  bool is_integer() const { return denominator() == 1; }

  Rational abs() const { return sign() < 0 ? -*this : *this; }
  Rational inverse() const {
    if (is_zero()) throw DomainError("inverse of zero");
    return Rational(denominator(), numerator());
  }
  Rational pow(long long e) const {
    if (e < 0) return inverse().pow(-e);
    Rational base = *this, acc = 1;
    while (e > 0) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  }

  Real to_real() const { return Real(numerator()) / Real(denominator()); }
  double to_double() const { return to_real().convert_to<double>(); }
  long double to_long_double() const { return to_real().convert_to<long double>(); }

  std::string to_string() const {
    if (is_integer()) return numerator().str();
    return numerator().str() + "/" + denominator().str();
  }

  Rational operator-() const {
    Rational r;
    r.v_ = -v_;
    return r;
  }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw DomainError("division by zero");
    v_ /= o.v_;
    return *this;
  }
  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = a.v_.compare(b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

 private:
  boost::multiprecision::mpq_rational v_;
};

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// Multiplicative-gcd of positive rationals: the largest g with every x/g integral.
inline Rational rational_gcd(const Rational& a, const Rational& b) {
  BigInt n = boost::multiprecision::gcd(a.numerator() * b.denominator(), b.numerator() * a.denominator());
  return Rational(boost::multiprecision::abs(n), a.denominator() * b.denominator());
}

struct ComplexRational {
  Rational re;
  Rational im;

  ComplexRational() = default;
  ComplexRational(long long r) : re(r) {}                  // NOLINT(google-explicit-constructor)
  ComplexRational(Rational r) : re(std::move(r)) {}        // NOLINT(google-explicit-constructor)
  ComplexRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static ComplexRational i() { return {0, 1}; }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  bool is_real() const { return im.is_zero(); }
  ComplexRational conj() const { return {re, -im}; }
  Rational norm2() const { return re * re + im * im; }
  ComplexRational inverse() const {
    Rational n = norm2();
    if (n.is_zero()) throw DomainError("inverse of complex zero");
    return {re / n, -im / n};
  }
  ComplexRational pow(long long e) const {
    if (e < 0) return inverse().pow(-e);
    ComplexRational base = *this, acc = 1;
    while (e > 0) {
      if (e & 1) acc = acc * base;
      base = base * base;
      e >>= 1;
    }
    return acc;
  }

  ComplexRational operator-() const { return {-re, -im}; }
  friend ComplexRational operator+(const ComplexRational& a, const ComplexRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend ComplexRational operator-(const ComplexRational& a, const ComplexRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend ComplexRational operator*(const ComplexRational& a, const ComplexRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ComplexRational operator/(const ComplexRational& a, const ComplexRational& b) {
    return a * b.inverse();
  }
  ComplexRational& operator+=(const ComplexRational& o) { return *this = *this + o; }
  ComplexRational& operator-=(const ComplexRational& o) { return *this = *this - o; }
  ComplexRational& operator*=(const ComplexRational& o) { return *this = *this * o; }
  friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
    return a.re == b.re && a.im == b.im;
  }

  std::string to_string() const {
    if (im.is_zero()) return re.to_string();
    Rational mag = im.abs();
    std::string imag = mag == 1 ? std::string("i") : mag.to_string() + "*i";
    if (re.is_zero()) return (im.sign() < 0 ? "-" : "") + imag;
    return re.to_string() + (im.sign() > 0 ? " + " : " - ") + imag;
  }
};

/// Complex number over Real, used for numeric series sums.
struct Complex {
  Real re = 0;
  Real im = 0;

  Complex() = default;
  Complex(Real r, Real i = 0) : re(std::move(r)), im(std::move(i)) {}  // NOLINT
  static Complex from(const ComplexRational& z) { return {z.re.to_real(), z.im.to_real()}; }

  Real abs() const { return boost::multiprecision::sqrt(re * re + im * im); }
  friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
  friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Complex operator*(const Complex& a, const Real& s) { return {a.re * s, a.im * s}; }
  Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
};

// ---------------------------------------------------------------------------
// Integer combinatorics

inline BigInt factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned k = 2; k <= n; ++k) r *= k;
  return r;
}

/// 1*3*5*...*n for odd n >= 1.
inline BigInt double_factorial(long long n) {
  if (n < 1 || n % 2 == 0) throw DomainError("double_factorial expects an odd n >= 1, got " + std::to_string(n));
  BigInt r = 1;
  for (long long k = 3; k <= n; k += 2) r *= k;
  return r;
}

inline BigInt binomial(long long n, long long k) {
  if (n < 0 || k < 0) throw DomainError("binomial expects natural arguments");
  if (k > n) throw DomainError("binomial(" + std::to_string(n) + ", " + std::to_string(k) + "): k > n");
  k = std::min(k, n - k);
  BigInt r = 1;
  for (long long j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// ---------------------------------------------------------------------------
// ExactValue

struct Residue {
  Rational coeff;
  Real shadow;  // numeric value of the atom itself
};

/// rational_part + pi_coefficient * pi + sum(coeff_i * atom_i). Atoms are
/// canonical expression strings ("exp(-1)", "log(2)", "pi*erf(3/sqrt(2))")
/// carrying a 50-digit numeric shadow.
class ExactValue {
 public:
  ExactValue() = default;
  static ExactValue rational(Rational r) {
    ExactValue v;
    v.rational_ = std::move(r);
    return v;
  }
  static ExactValue pi_multiple(Rational c) {
    ExactValue v;
    v.pi_ = std::move(c);
    return v;
  }
  static ExactValue atom(Rational coeff, const std::string& name, Real shadow) {
    ExactValue v;
    v.add_atom(std::move(coeff), name, std::move(shadow));
    return v;
  }

  const Rational& rational_part() const { return rational_; }
  const Rational& pi_coefficient() const { return pi_; }
  const std::map<std::string, Residue>& residues() const { return residues_; }

  bool is_zero() const { return rational_.is_zero() && pi_.is_zero() && residues_.empty(); }
  bool is_rational() const { return pi_.is_zero() && residues_.empty(); }
  bool is_pure_pi_multiple() const { return rational_.is_zero() && residues_.empty(); }

  Real numeric() const {
    Real v = rational_.to_real() + pi_.to_real() * real_pi();
    for (const auto& [name, r] : residues_) v += r.coeff.to_real() * r.shadow;
    return v;
  }

  ExactValue& operator+=(const ExactValue& o) {
    rational_ += o.rational_;
    pi_ += o.pi_;
    for (const auto& [name, r] : o.residues_) add_atom(r.coeff, name, r.shadow);
    return *this;
  }
  ExactValue& operator*=(const Rational& s) {
    if (s.is_zero()) return *this = ExactValue();
    rational_ *= s;
    pi_ *= s;
    for (auto& [name, r] : residues_) r.coeff *= s;
    return *this;
  }
  friend ExactValue operator+(ExactValue a, const ExactValue& b) { return a += b; }
  friend ExactValue operator-(ExactValue a, ExactValue b) { return a += (b *= Rational(-1)); }
  friend ExactValue operator*(ExactValue a, const Rational& s) { return a *= s; }
  friend ExactValue operator*(const Rational& s, ExactValue a) { return a *= s; }

  friend bool operator==(const ExactValue& a, const ExactValue& b) {
    if (!(a.rational_ == b.rational_) || !(a.pi_ == b.pi_) || a.residues_.size() != b.residues_.size())
      return false;
    for (const auto& [name, r] : a.residues_) {
      auto it = b.residues_.find(name);
      if (it == b.residues_.end() || !(it->second.coeff == r.coeff)) return false;
    }
    return true;
  }

  std::string to_string() const {
    std::vector<std::pair<Rational, std::string>> parts;
    if (!rational_.is_zero()) parts.emplace_back(rational_, "");
    if (!pi_.is_zero()) parts.emplace_back(pi_, "pi");
    for (const auto& [name, r] : residues_) parts.emplace_back(r.coeff, name);
    if (parts.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto& [c, name] = parts[i];
      Rational mag = c;
      if (i == 0) {
        if (c.sign() < 0) out += "-";
      } else {
        out += c.sign() < 0 ? " - " : " + ";
      }
      mag = c.abs();
      if (name.empty()) {
        out += mag.to_string();
      } else if (mag == 1) {
        out += name;
      } else if (mag.is_integer()) {
        out += mag.to_string() + "*" + name;
      } else {
        out += mag.numerator().str() == "1" ? name + "/" + mag.denominator().str()
                                             : mag.numerator().str() + "*" + name + "/" + mag.denominator().str();
      }
    }
    return out;
  }

 private:
  void add_atom(Rational coeff, const std::string& name, Real shadow) {
    if (coeff.is_zero()) return;
    auto it = residues_.find(name);
    if (it == residues_.end()) {
      residues_.emplace(name, Residue{std::move(coeff), std::move(shadow)});
      return;
    }
    it->second.coeff += coeff;
    if (it->second.coeff.is_zero()) residues_.erase(it);
  }

  Rational rational_;
  Rational pi_;
  std::map<std::string, Residue> residues_;
};

// ---------------------------------------------------------------------------
// Canonical transcendental atoms

/// log(q) for rational q > 0, split over prime factors so that
/// log(4) - 2*log(2) cancels exactly.
inline ExactValue exact_log(const Rational& q) {
  if (q.sign() <= 0) throw DomainError("log of non-positive value " + q.to_string());
  ExactValue out;
  auto add_factors = [&out](BigInt n, int sign) {
    auto emit = [&out, sign](const BigInt& p, long long e) {
      Real shadow = boost::multiprecision::log(Real(p));
      out += ExactValue::atom(Rational(sign * e), "log(" + p.str() + ")", shadow);
    };
    for (BigInt p = 2; p * p <= n && p < 1000000; ++p) {
      long long e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      if (e) emit(p, e);
    }
    if (n > 1) emit(n, 1);
  };
  add_factors(q.numerator(), 1);
  add_factors(q.denominator(), -1);
  return out;
}

inline std::string exp_atom_name(const Rational& q) { return "exp(" + q.to_string() + ")"; }

}  // namespace opcalc
