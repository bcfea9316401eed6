#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opcalc/exact.hpp"
#include "opcalc/series.hpp"

namespace opcalc {

struct Diagnostics {
  std::size_t truncation = kDefaultTruncation;
  std::optional<double> regularization;
  std::string verdict = "exact";
  std::vector<std::string> attempts;  // routes tried before the one that answered
  std::vector<std::string> notes;
};

struct TransformResult {
  std::optional<ExactValue> exact;
  std::optional<ExactValue> exact_imag;  // imaginary part, for complex transform values
  Real approx = 0;
  Real approx_imag = 0;
  std::string method;
  std::string formula;
  Diagnostics diagnostics;

  static TransformResult from_exact(ExactValue v, std::string method, std::string formula) {
    TransformResult r;
    r.approx = v.numeric();
    r.exact = std::move(v);
    r.method = std::move(method);
    r.formula = std::move(formula);
    return r;
  }
};

}  // namespace opcalc
