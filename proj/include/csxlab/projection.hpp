#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "csxlab/barrier.hpp"
#include "csxlab/kernels.hpp"
#include "csxlab/rates.hpp"
#include "csxlab/weighted_grid.hpp"

namespace csxlab {

/// Produces a field on any grid it is handed (a closed form, an extension, ...).
using FieldSampler = std::function<ExtensionField(const GridPtr&)>;

inline FieldSampler analytic_sampler(std::function<double(double, const Point&)> f) {
  return [f = std::move(f)](const GridPtr& g) { return ExtensionField::sample(g, f); };
}

inline FieldSampler extension_sampler(const BoundaryFunction& u, const FracOrder& order,
                                      double tol = quad::kDefaultTol) {
  ExtensionSampler s(u, order, tol);
  return [s](const GridPtr& g) { return s(g); };
}

/// Nodes of g inside the closed half-ball [0, r] x B_r(x0).
inline std::vector<bool> half_ball_mask(const WeightedGrid& g, const Point& x0, double r) {
  const double rr = r * (1 + 1e-12);
  std::vector<bool> m(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) m[k] = g.t(k) <= rr && norm(g.x(k) - x0) <= rr;
  return m;
}

namespace detail {

struct Pairing {
  double wh = 0.0, hh = 0.0, ww = 0.0;
  std::size_t support = 0;  // nodes where the barrier is positive
};

inline Pairing pair_with_barrier(const ExtensionField& W, const Point& x0, const Point& nu, double r) {
  const auto& g = *W.grid();
  const FracOrder& order = g.order();
  const auto mask = half_ball_mask(g, x0, r);
  std::vector<double> wh, hh, ww;
  Pairing p;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!mask[k]) continue;
    const double h = barrier_halfspace(g.t(k), g.x(k), x0, nu, order);
    const double w = g.weight(k);
    wh.push_back(w * W[k] * h);
    hh.push_back(w * h * h);
    ww.push_back(w * W[k] * W[k]);
    if (h > 0 && w > 0) ++p.support;
  }
  p.wh = quad::pairwise_sum(wh);
  p.hh = quad::pairwise_sum(hh);
  p.ww = quad::pairwise_sum(ww);
  return p;
}

}  // namespace detail

/// Q_r(x0) = <W, H> / <H, H> in L^2(t^{1-2s}) over the grid nodes of B_r^+(x0),
/// H the half-space barrier at (x0, nu).
inline double project_coefficient(const ExtensionField& W, const Point& x0, const Point& nu, double r) {
  if (!(r > 0)) throw std::invalid_argument("radius must be positive");
  const auto p = detail::pair_with_barrier(W, x0, nu, r);
  if (p.support < 4 || !(p.hh > 0)) throw ProjectionError("barrier energy vanishes on the half-ball: r below grid floor");
  return p.wh / p.hh;
}

/// <W - P_r W, P_r W>, zero for an exact least-squares projection.
inline double projection_residual(const ExtensionField& W, const Point& x0, const Point& nu, double r) {
  const auto p = detail::pair_with_barrier(W, x0, nu, r);
  if (p.support < 4 || !(p.hh > 0)) throw ProjectionError("barrier energy vanishes on the half-ball: r below grid floor");
  const double q = p.wh / p.hh;
  // <W, qH> - <qH, qH>, expanded so the two terms cancel at the same scale
  return q * p.wh - q * q * p.hh;
}

/// |W| |P_r W| on the half-ball, the natural scale for projection_residual.
inline double projection_scale(const ExtensionField& W, const Point& x0, const Point& nu, double r) {
  const auto p = detail::pair_with_barrier(W, x0, nu, r);
  return std::sqrt(p.ww) * std::abs(p.wh) / std::sqrt(p.hh);
}

struct ProjectionReport {
  Point x0{}, nu{};
  std::vector<double> radii;       ///< r_k = r0 2^{-k}, decreasing
  std::vector<double> q_values;    ///< Q_{r_k}
  std::vector<double> increments;  ///< |Q_{r_{k+1}} - Q_{r_k}|
  double q_limit = 0.0;
  double rate = 0.0;               ///< fitted exponent of |Q_r - q_limit|
  double increment_exponent = 0.0; ///< fitted exponent of the increments
  double increment_ratio = 0.0;    ///< 2^{-increment_exponent}, used for the tail
  bool exact = false;              ///< all increments vanish: W is in the span
  bool cauchy = false;             ///< increments decay geometrically
};

/// Half-ball grid around x0 with polar axis along nu.
inline GridPtr half_ball_grid(const Point& x0, const Point& nu, double r, const FracOrder& order, int resolution) {
  return graded_grid(HalfBall{x0, r, nu}, order, resolution);
}

/// Q_r on the dyadic radii r0 2^{-k}, k = 0..kmax, each on its own half-ball
/// grid, and the limit extrapolated by the geometric tail of the increments.
inline ProjectionReport projection_limit(const FieldSampler& W, const Point& x0, const Point& nu, double r0, int kmax,
                                         const FracOrder& order, int resolution = 16) {
  if (kmax < 4) throw std::invalid_argument("projection_limit needs kmax >= 4");
  ProjectionReport rep;
  rep.x0 = x0;
  rep.nu = nu;
  double qscale = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    const double r = std::ldexp(r0, -k);
    auto grid = half_ball_grid(x0, nu, r, order, resolution);
    rep.radii.push_back(r);
    rep.q_values.push_back(project_coefficient(W(grid), x0, nu, r));
    qscale = std::max(qscale, std::abs(rep.q_values.back()));
  }
  for (int k = 0; k < kmax; ++k) rep.increments.push_back(std::abs(rep.q_values[k + 1] - rep.q_values[k]));
  const double qlast = rep.q_values.back();
  bool all_zero = true;
  for (double d : rep.increments) all_zero = all_zero && d <= 1e-12 * std::max(qscale, 1e-300);
  if (all_zero) {
    rep.exact = rep.cauchy = true;
    rep.q_limit = qlast;
    rep.rate = rep.increment_exponent = std::numeric_limits<double>::infinity();
    return rep;
  }
  std::vector<double> inc_r(rep.radii.begin(), rep.radii.end() - 1);
  const auto fit = fit_rate(inc_r, rep.increments);
  rep.increment_exponent = fit.fitted_exponent;
  rep.increment_ratio = std::exp2(-fit.fitted_exponent);
  rep.cauchy = fit.fitted_exponent > 0 && rep.increments.back() < rep.increments.front();
  if (rep.cauchy) {
    const double rho = rep.increment_ratio;
    const double step = rep.q_values[kmax] - rep.q_values[kmax - 1];
    rep.q_limit = qlast + step * rho / (1 - rho);
  } else {
    rep.q_limit = qlast;
  }
  std::vector<double> gaps;
  for (double q : rep.q_values) gaps.push_back(std::abs(q - rep.q_limit));
  try {
    rep.rate = fit_rate(rep.radii, gaps).fitted_exponent;
  } catch (const std::invalid_argument&) {
    rep.rate = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

struct BlowupField {
  ExtensionField field;  ///< V on the unit half-ball grid
  double q = 0.0;        ///< Q_r used in the numerator
  double theta = 0.0;    ///< normaliser actually applied
  bool zero = false;     ///< numerator vanished (W in the span)
};

/// V(z) = (W(x0 + r z) - Q_r H(x0 + r z)) / (r^{2s-eps} theta) on B_1^+. With
/// theta <= 0 the sup of the numerator is used, so V has unit sup-norm.
inline BlowupField blowup_rescale(const FieldSampler& W, const Point& x0, const Point& nu, double r, double eps,
                                  double theta, const FracOrder& order, int resolution = 16) {
  auto grid = half_ball_grid(x0, nu, r, order, resolution);
  auto unit = half_ball_grid({0.0, 0.0}, nu, 1.0, order, resolution);
  const auto w = W(grid);
  BlowupField out;
  out.q = project_coefficient(w, x0, nu, r);
  std::vector<double> num(grid->size());
  double sup = 0.0;
  for (std::size_t k = 0; k < grid->size(); ++k) {
    num[k] = w[k] - out.q * barrier_halfspace(grid->t(k), grid->x(k), x0, nu, order);
    sup = std::max(sup, std::abs(num[k]));
  }
  const double scale = std::pow(r, 2 * order.s() - eps);
  if (sup == 0.0 || sup <= 1e-15 * w.sup_norm()) {
    out.zero = true;
    out.field = ExtensionField(unit);
    return out;
  }
  out.theta = theta > 0 ? theta : sup / scale;
  for (double& v : num) v /= scale * out.theta;
  // the r-grid is the unit grid scaled about x0, node for node
  out.field = ExtensionField(unit, std::move(num));
  return out;
}

}  // namespace csxlab
