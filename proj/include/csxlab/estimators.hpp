#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "csxlab/barrier.hpp"
#include "csxlab/geometry.hpp"
#include "csxlab/projection.hpp"
#include "csxlab/rates.hpp"
#include "csxlab/weighted_grid.hpp"

namespace csxlab {

/// e(r) = sup over the B_r^+(x0) grid of |W - q H_+^{x0,nu}|, fitted against r.
/// Radii must be decreasing; each gets its own half-ball grid.
inline RateReport taylor_gap(const FieldSampler& W, const Point& x0, const Point& nu, double q,
                             const std::vector<double>& radii, const FracOrder& order, int resolution = 16) {
  std::vector<double> errs;
  double wscale = 0.0;
  for (double r : radii) {
    if (!(r > 0)) throw std::invalid_argument("radius must be positive");
    auto grid = half_ball_grid(x0, nu, r, order, resolution);
    if (grid->nt() < 4) throw ProjectionError("radius below grid floor");
    const auto w = W(grid);
    double e = 0.0;
    for (std::size_t k = 0; k < grid->size(); ++k)
      e = std::max(e, std::abs(w[k] - q * barrier_halfspace(grid->t(k), grid->x(k), x0, nu, order)));
    errs.push_back(e);
    wscale = std::max(wscale, w.sup_norm());
  }
  bool exact = true;
  for (double e : errs) exact = exact && e <= 1e-13 * std::max(wscale, 1e-300);
  if (exact) {
    RateReport rep;
    rep.radii = radii;
    rep.errors = errs;
    rep.exact = true;
    rep.fitted_exponent = std::numeric_limits<double>::infinity();
    return rep;
  }
  return fit_rate(radii, errs);
}

/// The six boundary-barrier comparisons around points xbar0 near ∂Ω, each on
/// the half-ball B_r^+(xbar0) with r = delta(xbar0)/2 and (x0, nu) the nearest
/// boundary point of xbar0:
///   sup |H_+ - H_Ω|, [H_+ - H_Ω]_{s-eps}, [1/H_+]_{s-eps},
///   sup |d^s - H_Ω|, [d^s - H_Ω]_{s-eps}, [d^{-s}]_{s-eps}.
struct BarrierGapSuite {
  std::vector<Point> xbar0;
  RateReport sup_halfspace, semi_halfspace, semi_inverse_halfspace;
  RateReport sup_dist, semi_dist, semi_inverse_dist;
  double alpha = 0.0;
};

/// xbar0 = x0 + 2r nu for each r, so that delta(xbar0)/2 = r when the inner
/// normal segment stays inside the tubular neighbourhood.
inline std::vector<Point> xbar_schedule(const BoundaryPoint& b, const std::vector<double>& radii) {
  std::vector<Point> out;
  for (double r : radii) out.push_back(b.x0 + (2 * r) * b.nu);
  return out;
}

inline BarrierGapSuite barrier_gap_suite(const DomainGeometry& geom, const std::vector<Point>& xbar0,
                                         const FracOrder& order, double eps, int resolution = 12,
                                         const HolderOptions& hopt = {}) {
  if (xbar0.size() < 4) throw std::invalid_argument("barrier_gap_suite needs at least 4 points");
  BarrierGapSuite out;
  out.xbar0 = xbar0;
  out.alpha = order.s() - eps;
  const double s = order.s();
  std::vector<double> radii;
  std::array<std::vector<double>, 6> e;
  for (const Point& xb : xbar0) {
    const auto b = geom.nearest_boundary(xb);
    const double r = 0.5 * geom.delta(xb);
    if (!(r > 0)) throw GeometryError("xbar0 must lie inside the domain");
    radii.push_back(r);
    auto grid = graded_grid(HalfBall{xb, r, b.nu}, order, resolution);
    const auto& g = *grid;
    std::vector<double> dh(g.size()), ih(g.size()), dd(g.size()), id(g.size());
    double sup_h = 0.0, sup_d = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double t = g.t(k);
      const Point& x = g.x(k);
      const double hp = barrier_halfspace(t, x, b.x0, b.nu, order);
      const double ho = barrier_domain(t, x, geom, order);
      const double ds = std::pow(geom.d_dist(t, x), s);
      dh[k] = hp - ho;
      ih[k] = 1.0 / hp;
      dd[k] = ds - ho;
      id[k] = 1.0 / ds;
      sup_h = std::max(sup_h, std::abs(dh[k]));
      sup_d = std::max(sup_d, std::abs(dd[k]));
    }
    e[0].push_back(sup_h);
    e[1].push_back(holder_seminorm(ExtensionField(grid, dh), out.alpha, {}, hopt).seminorm);
    e[2].push_back(holder_seminorm(ExtensionField(grid, ih), out.alpha, {}, hopt).seminorm);
    e[3].push_back(sup_d);
    e[4].push_back(holder_seminorm(ExtensionField(grid, dd), out.alpha, {}, hopt).seminorm);
    e[5].push_back(holder_seminorm(ExtensionField(grid, id), out.alpha, {}, hopt).seminorm);
  }
  auto fit = [&](const std::vector<double>& errs) {
    bool zero = true;
    for (double v : errs) zero = zero && v == 0.0;
    if (!zero) return fit_rate(radii, errs);
    RateReport rep;
    rep.radii = radii;
    rep.errors = errs;
    rep.exact = true;
    rep.fitted_exponent = std::numeric_limits<double>::infinity();
    return rep;
  };
  out.sup_halfspace = fit(e[0]);
  out.semi_halfspace = fit(e[1]);
  out.semi_inverse_halfspace = fit(e[2]);
  out.sup_dist = fit(e[3]);
  out.semi_dist = fit(e[4]);
  out.semi_inverse_dist = fit(e[5]);
  return out;
}

enum class Denominator { d_pow_s, barrier_domain };

struct RatioField {
  ExtensionField psi;         ///< W / denominator; 0 at excluded nodes
  std::vector<bool> included; ///< nodes of [0, 1] x closure(Ω) carrying a value
  HolderReport holder;
  std::size_t excluded = 0;   ///< nodes in the region below the division floor
  std::size_t interface = 0;  ///< interface nodes filled from the projection limit
};

struct RatioOptions {
  double alpha = 0.0;
  double floor = 1e-12;  ///< denominators at or below this are not divided by
  /// Q(x0) at interface points; the barrier and d^s both have ratio limit 1
  /// along the trace, so the interface value of Ψ is Q(x0) itself.
  std::function<double(const Point&)> interface_value;
  HolderOptions holder{};
};

/// Ψ = W / denominator on the grid nodes of [0, 1] x closure(Ω), with the
/// interface {t = 0, x in ∂Ω} filled from `interface_value`, and its Hölder
/// seminorm at opt.alpha.
inline RatioField ratio_field(const ExtensionField& W, const DomainGeometry& geom, Denominator denom,
                              const RatioOptions& opt) {
  const auto& g = *W.grid();
  const FracOrder& order = g.order();
  const double s = order.s();
  RatioField out;
  std::vector<double> psi(g.size(), 0.0);
  out.included.assign(g.size(), false);
  std::vector<double> sd(g.nx());
  for (std::size_t i = 0; i < g.nx(); ++i) sd[i] = geom.signed_distance(g.x(i));
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double t = g.t(k), dist = sd[k % g.nx()];
    if (t > 1.0 + 1e-12 || dist < -1e-12) continue;
    const double delta = std::max(dist, 0.0);
    const double d = denom == Denominator::d_pow_s ? std::pow(std::hypot(t, delta), s) : barrier_polar(t, delta, order);
    if (d > opt.floor) {
      psi[k] = W[k] / d;
      out.included[k] = true;
    } else if (t == 0.0 && delta <= 1e-12 && opt.interface_value) {
      psi[k] = opt.interface_value(g.x(k));
      out.included[k] = true;
      ++out.interface;
    } else {
      ++out.excluded;
    }
  }
  out.psi = ExtensionField(W.grid(), std::move(psi));
  out.holder = holder_seminorm(out.psi, opt.alpha, out.included, opt.holder);
  return out;
}

}  // namespace csxlab
