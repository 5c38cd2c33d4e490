#pragma once

// Thin layer over Boost.Math adaptive quadrature. Integrands receive the
// abscissa together with its exact distances to both interval ends, which
// keeps endpoint-singular factors such as (b - x)^(s-1) accurate.

#include <algorithm>
#include <array>
#include <memory>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "csxlab/order.hpp"

namespace csxlab::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

/// Engine with the given maximum number of refinement levels (4 to 15).
inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_engine(std::size_t levels = 15) {
  using Engine = boost::math::quadrature::tanh_sinh<double>;
  static thread_local std::array<std::unique_ptr<Engine>, 16> engines;
  levels = std::clamp<std::size_t>(levels, 4, 15);
  if (!engines[levels]) engines[levels] = std::make_unique<Engine>(levels);
  return *engines[levels];
}

/// Default relative tolerance handed to the double-exponential rule.
inline constexpr double kDefaultTol = 1e-11;

/// Integrate f(x, dist_to_a, dist_to_b) over [a, b] with tanh-sinh.
/// The error check uses max(|I|, L1) so cancelling integrands are judged
/// against their natural scale; `abs_floor` covers integrands that vanish.
template <class F>
Result integrate(F&& f, double a, double b, double tol = kDefaultTol, double accept = 1e-7,
                 double abs_floor = 1e-300, std::size_t levels = 15) {
  Result r;
  if (!(b > a)) return r;
  const double mid = 0.5 * (a + b);
  double lo_seen = std::numeric_limits<double>::infinity(), hi_seen = -lo_seen;
  auto g = [&](double x, double xc) -> double {
    double dl, du;
    if (x < mid) {
      dl = (xc < 0.0) ? -xc : x - a;
      du = b - x;
    } else {
      du = (xc > 0.0) ? xc : b - x;
      dl = x - a;
    }
    if (dl <= 0.0 || du <= 0.0) return 0.0;
    const double v = f(x, dl, du);
    lo_seen = std::min(lo_seen, v);
    hi_seen = std::max(hi_seen, v);
    return v;
  };
  std::size_t used = 0;
  r.value = tanh_sinh_engine(levels).integrate(g, a, b, tol, &r.error, &r.l1, &used);
  // Boost scales L1 to [a, b] but leaves the error estimate on [-1, 1]
  r.error *= 0.5 * (b - a);
  // positive weights summing to b - a bound the error by the sampled range
  if (hi_seen >= lo_seen) r.error = std::min(r.error, (b - a) * (hi_seen - lo_seen));
  const double scale = std::max({std::abs(r.value), r.l1, abs_floor});
  if (!std::isfinite(r.value) || r.error > accept * scale) {
    throw QuadratureError("tanh-sinh quadrature did not reach tolerance", r.error / scale);
  }
  return r;
}

/// Same as integrate() with interior break points (kinks of the integrand).
/// The distances handed to f are measured to the outer ends a and b.
template <class F>
Result integrate_pieces(F&& f, double a, double b, std::vector<double> breaks, double tol = kDefaultTol,
                        double accept = 1e-7, double abs_floor = 1e-300, std::size_t levels = 15) {
  std::erase_if(breaks, [&](double x) { return !(x > a && x < b); });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  Result total;
  double lo = a;
  breaks.push_back(b);
  for (double hi : breaks) {
    if (hi - lo > 1e-11 * (b - a)) {
      const double off_lo = lo - a, off_hi = b - hi;
      auto g = [&](double x, double dl, double du) { return f(x, dl + off_lo, du + off_hi); };
      Result piece = integrate(g, lo, hi, tol, std::numeric_limits<double>::infinity(), 1e-300, levels);
      total.value += piece.value;
      total.error += piece.error;
      total.l1 += piece.l1;
    }
    lo = hi;
  }
  // judged as a whole: a piece that is zero up to roundoff must not fail alone
  const double scale = std::max({std::abs(total.value), total.l1, abs_floor});
  if (!std::isfinite(total.value) || total.error > accept * scale) {
    throw QuadratureError("tanh-sinh quadrature did not reach tolerance", total.error / scale);
  }
  return total;
}

/// Adaptive 31-point Gauss-Kronrod for smooth integrands (no endpoint singularity).
template <class F>
Result integrate_smooth(F&& f, double a, double b, double tol = 1e-11, unsigned max_depth = 15) {
  Result r;
  if (!(b > a)) return r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, tol, &r.error,
                                                                          &r.l1);
  return r;
}

template <class F>
Result integrate_smooth_pieces(F&& f, double a, double b, std::vector<double> breaks, double tol = 1e-11) {
  std::erase_if(breaks, [&](double x) { return !(x > a && x < b); });
  std::sort(breaks.begin(), breaks.end());
  breaks.push_back(b);
  Result total;
  double lo = a;
  for (double hi : breaks) {
    if (hi > lo) {
      Result piece = integrate_smooth(f, lo, hi, tol);
      total.value += piece.value;
      total.error += piece.error;
      total.l1 += piece.l1;
    }
    lo = hi;
  }
  return total;
}

/// Pairwise (fixed-tree) summation; the order of additions depends only on n.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace csxlab::quad
