#pragma once

// Independent numeric quadrature in long double. Nothing here touches the
// operator layer; integrands are plain callables.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "opcalc/error.hpp"

namespace opcalc {

using Integrand = std::function<long double(long double)>;

struct QuadReport {
  long double value = 0;
  long double error_estimate = 0;
  std::size_t subdivisions = 0;
  long double truncation_radius = 0;
  bool converged = true;
};

namespace detail {

struct GKResult {
  long double value, error;
};

// 15-point Kronrod rule with its embedded 7-point Gauss rule.
inline GKResult gauss_kronrod15(const Integrand& f, long double a, long double b) {
  static constexpr long double xgk[8] = {
      0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
      0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
      0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
      0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};
  static constexpr long double wgk[8] = {
      0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
      0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
      0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
      0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
  static constexpr long double wg[4] = {
      0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
      0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};
  long double c = (a + b) / 2, h = (b - a) / 2;
  long double fc = f(c);
  long double kronrod = fc * wgk[7], gauss = fc * wg[3];
  for (int j = 0; j < 7; ++j) {
    long double dx = h * xgk[j];
    long double s = f(c - dx) + f(c + dx);
    kronrod += wgk[j] * s;
    if (j % 2 == 1) gauss += wg[j / 2] * s;
  }
  return {kronrod * h, std::fabs((kronrod - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive bisection on the interval with the largest error.
inline QuadReport quad_interval(const Integrand& f, long double a, long double b, long double tol = 1e-12L,
                                std::size_t initial_pieces = 1, std::size_t budget = 20000) {
  struct Piece {
    long double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  std::priority_queue<Piece> heap;
  long double value = 0, error = 0;
  initial_pieces = std::max<std::size_t>(initial_pieces, 1);
  for (std::size_t i = 0; i < initial_pieces; ++i) {
    long double lo = a + (b - a) * static_cast<long double>(i) / static_cast<long double>(initial_pieces);
    long double hi = a + (b - a) * static_cast<long double>(i + 1) / static_cast<long double>(initial_pieces);
    auto r = detail::gauss_kronrod15(f, lo, hi);
    heap.push({lo, hi, r.value, r.error});
    value += r.value;
    error += r.error;
  }
  std::size_t subdivisions = 0;
  const long double roundoff = 50 * std::numeric_limits<long double>::epsilon();
  while (error > std::max(tol, roundoff * std::fabs(value)) && subdivisions < budget) {
    Piece p = heap.top();
    heap.pop();
    long double mid = (p.a + p.b) / 2;
    auto l = detail::gauss_kronrod15(f, p.a, mid);
    auto r = detail::gauss_kronrod15(f, mid, p.b);
    value += l.value + r.value - p.value;
    error += l.error + r.error - p.error;
    heap.push({p.a, mid, l.value, l.error});
    heap.push({mid, p.b, r.value, r.error});
    ++subdivisions;
  }
  // Re-sum to shed accumulated rounding from the running updates.
  long double total = 0, total_err = 0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  QuadReport rep;
  rep.value = total;
  rep.error_estimate = total_err;
  rep.subdivisions = subdivisions;
  rep.converged = total_err <= std::max(tol, roundoff * std::fabs(total));
  return rep;
}

enum class Decay { exponential, gaussian, oscillatory_algebraic };

struct RealLineOptions {
  // Oscillatory integrands: the gcd of all frequencies; segments have length pi/g.
  long double base_frequency = 1;
  long double max_radius = 1e4L;
};

namespace detail {

/// Doubles R until the integrand is negligible on [R, 2R] in direction `dir`.
inline long double envelope_radius(const Integrand& f, long double tol, int dir, long double from,
                                   long double max_radius) {
  long double r = std::max<long double>(1, std::fabs(from) + 1);
  while (r < max_radius) {
    long double peak = 0;
    for (int i = 0; i <= 32; ++i) {
      long double x = from + dir * (r + r * static_cast<long double>(i) / 32);
      long double v = std::fabs(f(x));
      if (std::isfinite(v)) peak = std::max(peak, v);
    }
    if (peak * r < tol / 100) return r;
    r *= 2;
  }
  return max_radius;
}

/// Polynomial extrapolation to h = 0 of values taken at nodes h_i (Neville).
inline std::pair<long double, long double> extrapolate_to_zero(const std::vector<long double>& h,
                                                               const std::vector<long double>& v) {
  std::vector<long double> p = v;
  long double best = p.back(), previous = p.back();
  std::size_t n = p.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      p[i] = (h[i - level] * p[i] - h[i] * p[i - 1]) / (h[i - level] - h[i]);
      if (i == level) break;
    }
    previous = best;
    best = p[n - 1];
  }
  return {best, std::fabs(best - previous)};
}

}  // namespace detail

/// Integral over the real line for a declared decay class.
///
/// Exponential and Gaussian decay: truncate where the envelope falls below
/// tol/100 and integrate the rest adaptively. Oscillatory algebraic decay:
/// integrate half-period segments symmetrically, smooth the partial sums by
/// iterated means, and extrapolate the remaining 1/K behaviour of the tail.
inline QuadReport quad_real_line(const Integrand& f, long double tol = 1e-10L, Decay decay = Decay::exponential,
                                 RealLineOptions opt = {}) {
  if (decay != Decay::oscillatory_algebraic) {
    long double right = detail::envelope_radius(f, tol, +1, 0, opt.max_radius);
    long double left = detail::envelope_radius(f, tol, -1, 0, opt.max_radius);
    auto pieces = static_cast<std::size_t>(std::ceil((left + right) / 2));
    QuadReport r = quad_interval(f, -left, right, tol / 10, pieces);
    r.truncation_radius = std::max(left, right);
    r.converged = r.converged && right < opt.max_radius && left < opt.max_radius;
    return r;
  }

  const long double h = static_cast<long double>(M_PIl) / opt.base_frequency;
  const std::size_t rounds = 12;  // iterated-mean passes over the last rounds+1 partial sums
  std::vector<long double> partial{0};
  std::size_t subdivisions = 0;
  auto extend = [&](std::size_t count) {
    while (partial.size() <= count) {
      std::size_t k = partial.size() - 1;
      long double lo = static_cast<long double>(k) * h, hi = lo + h;
      auto r1 = quad_interval(f, lo, hi, tol * 1e-4L, 1, 200);
      auto r2 = quad_interval(f, -hi, -lo, tol * 1e-4L, 1, 200);
      subdivisions += r1.subdivisions + r2.subdivisions + 2;
      partial.push_back(partial.back() + r1.value + r2.value);
    }
  };
  // Iterated means over the partial sums ending at K.
  auto smoothed = [&](std::size_t k) {
    std::vector<long double> s(partial.begin() + static_cast<long>(k - rounds), partial.begin() + static_cast<long>(k) + 1);
    for (std::size_t r = 0; r < rounds; ++r) {
      for (std::size_t i = 0; i + 1 < s.size(); ++i) s[i] = (s[i] + s[i + 1]) / 2;
      s.pop_back();
    }
    return s.back();
  };

  QuadReport rep;
  rep.converged = false;
  for (std::size_t k_max = 400; k_max <= 6400; k_max *= 2) {
    extend(k_max);
    std::vector<long double> nodes, values;
    for (std::size_t k = k_max / 16; k <= k_max; k *= 2) {
      // The means over [k - rounds, k] centre on k - rounds/2.
      nodes.push_back(1.0L / (static_cast<long double>(k) - static_cast<long double>(rounds) / 2));
      values.push_back(smoothed(k));
    }
    auto [value, err] = detail::extrapolate_to_zero(nodes, values);
    rep.value = value;
    rep.error_estimate = err;
    rep.subdivisions = subdivisions;
    rep.truncation_radius = static_cast<long double>(k_max) * h;
    if (err <= tol) {
      rep.converged = true;
      break;
    }
  }
  return rep;
}

/// Integral over [from, inf) (dir = +1) or (-inf, from] (dir = -1) for
/// exponentially decaying integrands.
inline QuadReport quad_half_line(const Integrand& f, long double from = 0, int dir = +1, long double tol = 1e-12L,
                                 long double max_radius = 1e4L) {
  long double r = detail::envelope_radius(f, tol, dir, from, max_radius);
  long double lo = dir > 0 ? from : from - r, hi = dir > 0 ? from + r : from;
  QuadReport rep = quad_interval(f, lo, hi, tol / 10, static_cast<std::size_t>(std::ceil(r)));
  rep.truncation_radius = r;
  rep.converged = rep.converged && r < max_radius;
  return rep;
}

}  // namespace opcalc
