#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "csxlab/boundary_function.hpp"
#include "csxlab/order.hpp"
#include "csxlab/parallel.hpp"
#include "csxlab/quadrature.hpp"
#include "csxlab/weighted_grid.hpp"

namespace csxlab {

/// Gamma(N/2 + s) / (π^{N/2} Gamma(s)): unit mass for P(t, .).
inline double poisson_normalization(const FracOrder& order) {
  const double h = 0.5 * order.dim(), s = order.s();
  return std::tgamma(h + s) / (std::pow(std::numbers::pi, h) * std::tgamma(s));
}

/// P(t, x) = c t^{2s} / (t^2 + |x|^2)^{(N+2s)/2}.
inline double poisson_kernel(double t, const Point& x, const FracOrder& order) {
  if (!(t > 0)) throw std::invalid_argument("Poisson kernel needs t > 0");
  const double s = order.s(), N = order.dim();
  const double r2 = t * t + dot(x, x);
  return poisson_normalization(order) * std::pow(t, 2 * s) * std::pow(r2, -0.5 * (N + 2 * s));
}

/// C_{N,s} = s 4^s Gamma(N/2 + s) / (π^{N/2} Gamma(1 - s)), for which
/// C PV∫ (u(x) - u(y)) / |x - y|^{N+2s} dy has symbol |ξ|^{2s}.
inline double frac_normalization(const FracOrder& order) {
  const double h = 0.5 * order.dim(), s = order.s();
  return s * std::pow(4.0, s) * std::tgamma(h + s) / (std::pow(std::numbers::pi, h) * std::tgamma(1.0 - s));
}

struct KernelConstants {
  double cns = 0.0;
  double ks = 0.0;
  double poisson_norm = 0.0;
};

namespace detail {

// Refinement caps for the nested 2-D rules; deeper levels only chase roundoff.
inline constexpr std::size_t kAngularLevels = 7;
inline constexpr std::size_t kRadialLevels = 8;

// Angles in [0, π) where the line through x in direction e_φ meets the kinks
// of u at distance rho (either sign).
inline void angular_breaks(const BoundaryFunction& u, const Point& x, double rho, std::vector<double>& out) {
  auto push = [&](double phi) {
    phi = std::fmod(phi, std::numbers::pi);
    if (phi < 0) phi += std::numbers::pi;
    out.push_back(phi);
  };
  for (const auto& c : u.kink_circles()) {
    const Point d = x - c.center;
    const double D = norm(d);
    if (D == 0.0) continue;
    const double alpha = std::atan2(d[1], d[0]);
    push(alpha);  // closest approach to the circle; near-tangent rays are steep there
    for (double sigma : {1.0, -1.0}) {
      const double cs = sigma * (c.radius * c.radius - D * D - rho * rho) / (2 * rho * D);
      if (std::abs(cs) > 1.0) continue;
      const double a = std::acos(cs);
      push(alpha + a);
      push(alpha - a);
    }
  }
  for (const auto& l : u.kink_lines()) {
    const double nn = norm(l.normal);
    const Point n = (1.0 / nn) * l.normal;
    const double beta = std::atan2(n[1], n[0]);
    const double off = dot(x - l.point, n);
    push(beta);
    const double cs = -off / rho;
    if (std::abs(cs) > 1.0) continue;
    const double a = std::acos(cs);
    push(beta + a);
    push(beta - a);
  }
}

// Radii at which the angular break structure changes (tangencies, support edge).
inline std::vector<double> radial_breaks(const BoundaryFunction& u, const Point& x) {
  std::vector<double> r;
  for (double k : u.kinks()) r.push_back(std::abs(k - x[0]));
  for (const auto& c : u.kink_circles()) {
    const double D = norm(x - c.center);
    r.push_back(std::abs(c.radius - D));
    r.push_back(c.radius + D);
  }
  for (const auto& l : u.kink_lines()) r.push_back(std::abs(dot(x - l.point, l.normal)) / norm(l.normal));
  if (u.decay() == DecayClass::compact_support) {
    const double D = norm(x - u.support_center());
    r.push_back(std::abs(u.support_radius() - D));
    r.push_back(u.support_radius() + D);
  }
  // smooth profiles concentrate near their centre; at small t that is a
  // sliver of the angular variable, so bracket it on a geometric ladder
  if (r.empty()) {
    const auto c = u.radial_center() ? *u.radial_center() : u.support_center();
    const double D = norm(x - c);
    for (int k = -3; k <= 3; ++k) r.push_back(std::ldexp(D, k));
  }
  std::erase_if(r, [](double v) { return !(v > 0) || !std::isfinite(v); });
  return r;
}

// ∫_0^π [u(x + ρ e) + u(x - ρ e) - 2 u(x)] dφ.
inline double angular_second_difference(const BoundaryFunction& u, const Point& x, double ux, double rho,
                                        double tol) {
  std::vector<double> br;
  angular_breaks(u, x, rho, br);
  auto f = [&](double phi, double, double) {
    const Point e{rho * std::cos(phi), rho * std::sin(phi)};
    return u(x + e) + u(x - e) - 2 * ux;
  };
  // not judged here: inner noise shows up in the error estimate of the outer integral
  return quad::integrate_pieces(f, 0.0, std::numbers::pi, std::move(br), tol, std::numeric_limits<double>::infinity(),
                                1e-300, kAngularLevels)
      .value;
}

}  // namespace detail

/// U(t, x) = ∫ P(t, y) u(x - y) dy, written with y = t tanψ (radially) so the
/// whole of R^N maps onto ψ in [0, π/2) and no tail truncation is needed.
inline double extension_value(const BoundaryFunction& u, double t, const Point& x, const FracOrder& order,
                              double tol = quad::kDefaultTol) {
  const double ux = u(x);
  if (t == 0.0) return ux;
  if (t < 0) throw std::invalid_argument("extension needs t >= 0");
  const double s = order.s();
  const double half_pi = 0.5 * std::numbers::pi;
  std::vector<double> breaks;
  for (double r : detail::radial_breaks(u, x)) breaks.push_back(std::atan(r / t));
  if (order.dim() == 1) {
    const double c = poisson_normalization(order);
    auto f = [&](double, double, double du) {
      const double cp = std::sin(du), sp = std::cos(du);
      const double y = t * sp / cp;
      const double d2 = u({x[0] + y, 0.0}) + u({x[0] - y, 0.0}) - 2 * ux;
      return d2 == 0.0 ? 0.0 : d2 * std::pow(cp, 2 * s - 1);
    };
    auto r = quad::integrate_pieces(f, 0.0, half_pi, breaks, tol, 1e-7);
    return ux + c * r.value;
  }
  const double inner_tol = std::max(0.1 * tol, 1e-9);
  auto f = [&](double, double dl, double du) {
    const double cp = std::sin(du), sp = std::cos(du);
    const double rho = t * sp / cp;
    const double inner = detail::angular_second_difference(u, x, ux, rho, inner_tol);
    return inner == 0.0 ? 0.0 : std::sin(dl) * std::pow(cp, 2 * s - 1) * inner;
  };
  auto r = quad::integrate_pieces(f, 0.0, half_pi, breaks, std::max(tol, 1e-8), 1e-5, 1e-300, detail::kRadialLevels);
  return ux + (s / std::numbers::pi) * r.value;
}

/// Samples the Poisson extension of u on every node of the grid.
inline ExtensionField extend_function(const BoundaryFunction& u, GridPtr grid, const FracOrder& order,
                                      double tol = quad::kDefaultTol) {
  u.require_integrable(order);
  const auto& g = *grid;
  std::vector<double> v(g.size());
  if (u.radial_center() && order.dim() == 2) {
    // identical (t, |x - c|) pairs are evaluated once
    const Point c = *u.radial_center();
    std::map<std::pair<double, double>, std::size_t> slot;
    std::vector<std::size_t> which(g.size());
    std::vector<std::pair<double, double>> keys;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double rho = norm(g.x(k) - c);
      const double q = std::round(rho * 1e12) / 1e12;
      auto [it, fresh] = slot.try_emplace({g.t(k), q}, keys.size());
      if (fresh) keys.push_back({g.t(k), rho});
      which[k] = it->second;
    }
    std::vector<double> uniq(keys.size());
    parallel_for(keys.size(), [&](std::size_t i) {
      uniq[i] = extension_value(u, keys[i].first, c + Point{keys[i].second, 0.0}, order, tol);
    });
    for (std::size_t k = 0; k < g.size(); ++k) v[k] = uniq[which[k]];
  } else {
    parallel_for(g.size(), [&](std::size_t k) { v[k] = extension_value(u, g.t(k), g.x(k), order, tol); });
  }
  // the trace row is u itself
  for (std::size_t i = 0; i < g.nx(); ++i) v[i] = u(g.x(i));
  return {std::move(grid), std::move(v)};
}

/// extend_function with memory: for radial u in N = 2 every (t, |x - c|) value
/// is computed once across all grids it is asked for. Thread-safe.
class ExtensionSampler {
 public:
  ExtensionSampler(BoundaryFunction u, FracOrder order, double tol = quad::kDefaultTol)
      : u_(std::move(u)), order_(order), tol_(tol), state_(std::make_shared<State>()) {}

  ExtensionField operator()(const GridPtr& grid) const {
    if (!(u_.radial_center() && order_.dim() == 2)) return extend_function(u_, grid, order_, tol_);
    u_.require_integrable(order_);
    const auto& g = *grid;
    const Point c = *u_.radial_center();
    std::vector<Key> keys(g.size());
    std::vector<double> rho(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      rho[k] = norm(g.x(k) - c);
      keys[k] = {g.t(k), std::llround(rho[k] * 1e12)};
    }
    std::vector<std::size_t> todo;
    {
      std::lock_guard lock(state_->mutex);
      std::map<Key, std::size_t> fresh;
      for (std::size_t k = 0; k < g.size(); ++k)
        if (keys[k].first > 0 && !state_->values.count(keys[k]) && fresh.try_emplace(keys[k], k).second)
          todo.push_back(k);
    }
    std::vector<double> out(todo.size());
    parallel_for(todo.size(), [&](std::size_t q) {
      const std::size_t k = todo[q];
      out[q] = extension_value(u_, g.t(k), c + Point{rho[k], 0.0}, order_, tol_);
    });
    std::vector<double> v(g.size());
    std::lock_guard lock(state_->mutex);
    for (std::size_t q = 0; q < todo.size(); ++q) state_->values.emplace(keys[todo[q]], out[q]);
    for (std::size_t k = 0; k < g.size(); ++k) v[k] = keys[k].first > 0 ? state_->values.at(keys[k]) : u_(g.x(k));
    return {grid, std::move(v)};
  }

  std::size_t cached() const {
    std::lock_guard lock(state_->mutex);
    return state_->values.size();
  }
  const BoundaryFunction& trace() const { return u_; }
  const FracOrder& order() const { return order_; }

 private:
  using Key = std::pair<double, long long>;
  struct State {
    mutable std::mutex mutex;
    std::map<Key, double> values;
  };
  BoundaryFunction u_;
  FracOrder order_;
  double tol_;
  std::shared_ptr<State> state_;
};

/// (-Delta)^s u(x) by the symmetrised second-difference form
///   C ∫_0^∞ [2u(x) - u(x+y) - u(x-y)] y^{-1-2s} dy      (N = 1)
/// split at pv_radius. The innermost piece [0, y_min] uses the local
/// second-difference quotient; it must settle as y_min shrinks, otherwise u is
/// not smooth at x and NonSmoothError is thrown.
inline double frac_laplacian_pv(const BoundaryFunction& u, const Point& x, const FracOrder& order,
                                double pv_radius) {
  if (!(pv_radius > 0)) throw std::invalid_argument("pv_radius must be positive");
  u.require_integrable(order);
  const double s = order.s();
  const double ux = u(x);
  const bool one_d = order.dim() == 1;
  // ∫ over directions of 2u(x) - u(x+y e) - u(x-y e); N=1 has a single direction
  auto D2 = [&](double y) {
    if (one_d) return 2 * ux - u({x[0] + y, 0.0}) - u({x[0] - y, 0.0});
    return -detail::angular_second_difference(u, x, ux, y, 1e-12);
  };
  const double kink = u.kink_distance(x);
  if (kink == 0.0) throw NonSmoothError("u has a kink at the evaluation point");
  const double y_min = 1e-3 * std::min(pv_radius, kink);

  std::array<double, 5> q{};
  for (int k = 0; k < 5; ++k) {
    const double y = y_min * std::ldexp(1.0, k);
    q[k] = D2(y) / (y * y);
  }
  // at inflection points q is legitimately small; measure against the quotient at pv_radius
  const double far_q = std::abs(D2(pv_radius)) / (pv_radius * pv_radius);
  const double qscale = std::max({std::abs(q[0]), std::abs(q[4]), far_q});
  const double roundoff = 1e-13 * (std::abs(ux) + 1.0) / (y_min * y_min);
  if (std::abs(q[0] - q[4]) > 0.05 * qscale + 16 * roundoff) {
    throw NonSmoothError("second-difference quotients do not settle; u is not smooth at x");
  }
  const double inner = q[0] * std::pow(y_min, 2 - 2 * s) / (2 - 2 * s);

  std::vector<double> breaks;
  for (double r : detail::radial_breaks(u, x)) breaks.push_back(r);
  auto near_f = [&](double y, double, double) { return D2(y) * std::pow(y, -1 - 2 * s); };
  const double near = quad::integrate_pieces(near_f, y_min, pv_radius, breaks, 1e-12, 1e-7).value;

  std::vector<double> vbreaks;
  for (double r : breaks)
    if (r > pv_radius) vbreaks.push_back(std::pow(pv_radius / r, 2 * s));
  auto far_f = [&](double, double dl, double) { return D2(pv_radius * std::pow(dl, -1.0 / (2 * s))); };
  const double far = std::pow(pv_radius, -2 * s) / (2 * s) *
                     quad::integrate_pieces(far_f, 0.0, 1.0, vbreaks, 1e-12, 1e-7).value;
  return frac_normalization(order) * (inner + near + far);
}

/// Ratio between the Fourier-symbol value of (-Delta)^s on exp(-|x|^2/2) at
/// x = 0, 2^s Gamma(N/2+s)/Gamma(N/2), and the unnormalised singular integral
/// computed by quadrature. Agrees with frac_normalization().
inline double calibrate_frac_normalization(const FracOrder& order) {
  const double h = 0.5 * order.dim(), s = order.s();
  const double symbol_value = std::pow(2.0, s) * std::tgamma(h + s) / std::tgamma(h);
  const double raw = frac_laplacian_pv(gaussian(), {0.0, 0.0}, order, 1.0) / frac_normalization(order);
  return symbol_value / raw;
}

}  // namespace csxlab
