#pragma once

#include <array>
#include <cmath>
#include <vector>
#include <numbers>
#include <stdexcept>

#include "csxlab/geometry.hpp"
#include "csxlab/order.hpp"
#include "csxlab/quadrature.hpp"
#include "csxlab/weighted_grid.hpp"

namespace csxlab {

enum class BarrierRoute { integral, polar };

/// h^+(t, delta) evaluated by one of two routes. The polar route is
/// polar_constant * r^s cos^{2s}(θ/2); polar_constant is fitted once against
/// the integral route.
struct BarrierEval {
  FracOrder order;
  BarrierRoute route = BarrierRoute::integral;
  double polar_constant = 1.0;

  double operator()(double t, double delta) const;
};

/// h^+(t, delta) = C' ∫ (delta + tρ)_+^s (1 + ρ^2)^{-(1+2s)/2} dρ,
/// C' = Gamma(1/2 + s) / (√π Gamma(s)). With ρ = tanψ, delta = r cosθ,
/// t = r sinθ the integrand becomes r^s cos^s(ψ - θ) cos^{s-1}ψ on
/// ψ in (θ - π/2, π/2). With u = π/2 - ψ this is sin^{s-1}(u) sin^s(L - u)
/// on (0, L), L = π - θ = atan2(t, -delta), which stays accurate when θ is
/// close to π. t = 0 goes through the same quadrature.
inline double barrier_integral(double t, double delta, const FracOrder& order) {
  if (t < 0) throw std::invalid_argument("barrier needs t >= 0");
  const double s = order.s();
  const double r = std::hypot(t, delta);
  const double L = std::atan2(t, -delta);
  if (r == 0.0 || L == 0.0) return 0.0;
  const double c = std::tgamma(0.5 + s) / (std::sqrt(std::numbers::pi) * std::tgamma(s));
  auto f = [&](double, double du, double dl) { return std::pow(std::sin(du), s - 1) * std::pow(std::sin(dl), s); };
  const auto res = quad::integrate(f, 0.0, L, 1e-13, 1e-9);
  return c * std::pow(r, s) * res.value;
}

/// r^s cos^{2s}(θ/2) = ((r + delta)/2)^s, θ in [0, π]; 0 on the Dirichlet ray
/// and at the corner.
inline double barrier_polar(double t, double delta, const FracOrder& order) {
  if (t < 0) throw std::invalid_argument("barrier needs t >= 0");
  const double s = order.s();
  if (t == 0.0) return delta > 0 ? std::pow(delta, s) : 0.0;
  const double r = std::hypot(t, delta);
  // r + delta loses digits for delta < 0; use t^2 / (r - delta) there
  const double half = delta >= 0 ? 0.5 * (r + delta) : 0.5 * t * t / (r - delta);
  return std::pow(half, s);
}

inline double BarrierEval::operator()(double t, double delta) const {
  if (route == BarrierRoute::integral) return barrier_integral(t, delta, order);
  return polar_constant * barrier_polar(t, delta, order);
}

/// Least-squares constant c minimising Σ (integral - c polar)^2 over the grid.
inline double fit_polar_constant(const FracOrder& order, const std::vector<double>& ts,
                                 const std::vector<double>& deltas) {
  double num = 0.0, den = 0.0;
  for (double t : ts)
    for (double d : deltas) {
      const double a = barrier_integral(t, d, order), b = barrier_polar(t, d, order);
      num += a * b;
      den += b * b;
    }
  return den > 0 ? num / den : 1.0;
}

/// (∂_t h^+, ∂_delta h^+) from the closed form; infinite at the corner.
inline std::array<double, 2> barrier_gradient(double t, double delta, const FracOrder& order) {
  const double s = order.s();
  const double r = std::hypot(t, delta);
  if (r == 0.0) return {INFINITY, INFINITY};
  const double theta = std::atan2(t, delta);
  const double c = std::cos(0.5 * theta), sn = std::sin(0.5 * theta);
  const double hr = s * std::pow(r, s - 1) * std::pow(c, 2 * s);
  const double ht = -s * std::pow(r, s - 1) * std::pow(c, 2 * s - 1) * sn;  // (1/r) ∂_θ h
  // e_r = (sinθ, cosθ), e_θ = (cosθ, -sinθ) in (t, delta)
  return {hr * std::sin(theta) + ht * std::cos(theta), hr * std::cos(theta) - ht * std::sin(theta)};
}

/// H_+^{x0,nu}(t, x) = h^+(t, (x - x0) . nu).
inline double barrier_halfspace(double t, const Point& x, const Point& x0, const Point& nu, const FracOrder& order) {
  return barrier_polar(t, dot(x - x0, nu), order);
}

inline ExtensionField barrier_halfspace_field(const Point& x0, const Point& nu, GridPtr grid, const FracOrder& order) {
  if (std::abs(norm(nu) - 1.0) > 1e-12) throw std::invalid_argument("normal must have unit length");
  return ExtensionField::sample(std::move(grid),
                                [&](double t, const Point& x) { return barrier_halfspace(t, x, x0, nu, order); });
}

/// H_Ω^+(t, x) = h^+(t, signed distance to ∂Ω). Inside Ω this is h^+(t, δ(x));
/// outside it continues the half-space barrier so the trace vanishes there.
inline double barrier_domain(double t, const Point& x, const DomainGeometry& geom, const FracOrder& order) {
  return barrier_polar(t, geom.signed_distance(x), order);
}

inline ExtensionField barrier_domain_field(const DomainGeometry& geom, GridPtr grid, const FracOrder& order) {
  const auto& g = *grid;
  std::vector<double> sd(g.nx());
  for (std::size_t i = 0; i < g.nx(); ++i) sd[i] = geom.signed_distance(g.x(i));
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) v[k] = barrier_polar(g.t(k), sd[k % g.nx()], order);
  return {std::move(grid), std::move(v)};
}

}  // namespace csxlab
