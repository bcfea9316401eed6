#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace opcalc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside an operation's domain (y <= 0 for a 1/y kernel, k > n, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : Error("parse error at position " + std::to_string(position) + ": " + msg), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// The integrand does not belong to the family a route requires.
class UnsupportedFamily : public Error {
 public:
  explicit UnsupportedFamily(const std::string& msg) : Error(msg), reasons_{msg} {}
  explicit UnsupportedFamily(std::vector<std::string> reasons)
      : Error(join(reasons)), reasons_(std::move(reasons)) {}
  const std::vector<std::string>& reasons() const { return reasons_; }

 private:
  static std::string join(const std::vector<std::string>& parts) {
    std::string out = "unsupported family";
    for (const auto& p : parts) out += "; " + p;
    return out;
  }
  std::vector<std::string> reasons_;
};

/// A limit, series, or quadrature failed to settle.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

}  // namespace opcalc
