#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "csxlab/order.hpp"

namespace csxlab {

enum class DomainKind { interval, disk, half_space, graph_perturbed_disk };

inline std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::interval: return "interval";
    case DomainKind::disk: return "disk";
    case DomainKind::half_space: return "half_space";
    case DomainKind::graph_perturbed_disk: return "graph_perturbed_disk";
  }
  return "unknown";
}

/// Boundary point with the unit normal pointing into the domain.
struct BoundaryPoint {
  Point x0;
  Point nu;
};

/// A C^{1,1} domain of R^N. Immutable after construction.
///
/// The perturbed disk has the radial graph rho(phi) = R (1 + a eta(phi)),
/// eta(phi) = (1 - (phi/w)^2)^2 on |phi| < w and 0 elsewhere. eta is C^{1,1}
/// but not C^2: its second derivative jumps at phi = +-w.
class DomainGeometry {
 public:
  static DomainGeometry interval(double a, double b) {
    if (!(b > a)) throw std::invalid_argument("interval requires a < b");
    DomainGeometry g(DomainKind::interval, 1);
    g.lo_ = a;
    g.hi_ = b;
    return g;
  }

  static DomainGeometry disk(Point center, double radius) {
    if (!(radius > 0)) throw std::invalid_argument("disk radius must be positive");
    DomainGeometry g(DomainKind::disk, 2);
    g.center_ = center;
    g.radius_ = radius;
    return g;
  }

  static DomainGeometry half_space(Point origin, Point inner_normal, int dim) {
    if (dim == 1) inner_normal[1] = 0.0, origin[1] = 0.0;
    const double n = norm(inner_normal);
    if (!(n > 0)) throw std::invalid_argument("half-space normal must be nonzero");
    if (dim == 1 && inner_normal[0] == 0.0) throw std::invalid_argument("1-D half-space normal must be +-1");
    DomainGeometry g(DomainKind::half_space, dim);
    g.center_ = origin;
    g.normal_ = (1.0 / n) * inner_normal;
    return g;
  }

  static DomainGeometry perturbed_disk(Point center, double radius, double amplitude, double width = 1.0) {
    if (!(radius > 0)) throw std::invalid_argument("disk radius must be positive");
    if (!(width > 0 && width <= std::numbers::pi)) throw std::invalid_argument("bump width must lie in (0, pi]");
    if (std::abs(amplitude) > 0.25) throw std::invalid_argument("perturbation amplitude capped at 0.25");
    DomainGeometry g(DomainKind::graph_perturbed_disk, 2);
    g.center_ = center;
    g.radius_ = radius;
    g.amplitude_ = amplitude;
    g.width_ = width;
    g.sample_boundary();
    if (g.max_curvature_ * radius > 20.0) {
      throw std::invalid_argument("perturbation too sharp: curvature bound exceeds 20/R");
    }
    return g;
  }

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }
  Point center() const { return center_; }
  double radius() const { return radius_; }
  double amplitude() const { return amplitude_; }
  double bump_width() const { return width_; }
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  Point normal() const { return normal_; }

  /// Positive inside, negative outside, |value| = distance to the boundary.
  double signed_distance(const Point& x) const {
    switch (kind_) {
      case DomainKind::interval: return std::min(x[0] - lo_, hi_ - x[0]);
      case DomainKind::disk: return radius_ - norm(x - center_);
      case DomainKind::half_space: return dot(x - center_, normal_);
      case DomainKind::graph_perturbed_disk: {
        const auto [phi, dist] = closest_parameter(x);
        (void)phi;
        return contains_star(x) ? dist : -dist;
      }
    }
    return 0.0;
  }

  /// delta(x) = dist(x, R^N \ Omega).
  double delta(const Point& x) const { return std::max(0.0, signed_distance(x)); }

  bool contains(const Point& x) const { return signed_distance(x) > 0.0; }

  /// d(t, x) = sqrt(t^2 + delta(x)^2).
  double d_dist(double t, const Point& x) const {
    if (t < 0) throw std::invalid_argument("d_dist requires t >= 0");
    return std::hypot(t, delta(x));
  }

  /// Radius of the boundary neighbourhood where the nearest point is unique.
  double tubular_radius() const {
    switch (kind_) {
      case DomainKind::interval: return 0.25 * (hi_ - lo_);
      case DomainKind::disk: return 0.5 * radius_;
      case DomainKind::half_space: return std::numeric_limits<double>::infinity();
      case DomainKind::graph_perturbed_disk: return 0.5 / max_curvature_;
    }
    return 0.0;
  }

  /// Curvature bound used as the C^{1,1} constant M of the boundary charts.
  double c11_bound() const {
    switch (kind_) {
      case DomainKind::interval:
      case DomainKind::half_space: return 0.0;
      case DomainKind::disk: return 1.0 / radius_;
      case DomainKind::graph_perturbed_disk: return max_curvature_;
    }
    return 0.0;
  }

  /// Nearest boundary point and inner normal. Refuses points farther than
  /// tubular_radius() from the boundary.
  BoundaryPoint nearest_boundary(const Point& xbar) const {
    const double sd = signed_distance(xbar);
    if (std::abs(sd) >= tubular_radius()) {
      throw GeometryError("point outside the tubular neighbourhood; nearest boundary point not unique");
    }
    switch (kind_) {
      case DomainKind::interval:
        if (xbar[0] - lo_ < hi_ - xbar[0]) return {{lo_, 0.0}, {1.0, 0.0}};
        return {{hi_, 0.0}, {-1.0, 0.0}};
      case DomainKind::disk: {
        const Point r = xbar - center_;
        const double n = norm(r);
        const Point u = (1.0 / n) * r;
        return {center_ + radius_ * u, -1.0 * u};
      }
      case DomainKind::half_space: return {xbar - sd * normal_, normal_};
      case DomainKind::graph_perturbed_disk: {
        const double phi = closest_parameter(xbar).first;
        return {boundary_point(phi), inner_normal(phi)};
      }
    }
    return {};
  }

  /// Boundary parametrisation for the disk-like kinds (counter-clockwise).
  Point boundary_point(double phi) const {
    const double rho = radial_graph(phi);
    return center_ + Point{rho * std::cos(phi), rho * std::sin(phi)};
  }

  Point inner_normal(double phi) const {
    const auto tan = tangent(phi);
    const double n = norm(tan);
    return {-tan[1] / n, tan[0] / n};
  }

  double radial_graph(double phi) const { return radius_ * (1.0 + amplitude_ * bump(phi, 0)); }

 private:
  DomainGeometry(DomainKind k, int dim) : kind_(k), dim_(dim) {}

  static double wrap(double phi) {
    phi = std::fmod(phi + std::numbers::pi, 2 * std::numbers::pi);
    if (phi < 0) phi += 2 * std::numbers::pi;
    return phi - std::numbers::pi;
  }

  // eta and its first two derivatives (order = 0, 1, 2).
  double bump(double phi, int order) const {
    if (kind_ != DomainKind::graph_perturbed_disk) return 0.0;
    const double p = wrap(phi);
    if (std::abs(p) >= width_) return 0.0;
    const double w2 = width_ * width_;
    const double q = 1.0 - p * p / w2;
    switch (order) {
      case 0: return q * q;
      case 1: return -4.0 * p * q / w2;
      default: return -4.0 * q / w2 + 8.0 * p * p / (w2 * w2);
    }
  }

  Point tangent(double phi) const {
    const double rho = radial_graph(phi);
    const double drho = radius_ * amplitude_ * bump(phi, 1);
    const double c = std::cos(phi), s = std::sin(phi);
    return {drho * c - rho * s, drho * s + rho * c};
  }

  Point second_derivative(double phi) const {
    const double rho = radial_graph(phi);
    const double d1 = radius_ * amplitude_ * bump(phi, 1);
    const double d2 = radius_ * amplitude_ * bump(phi, 2);
    const double c = std::cos(phi), s = std::sin(phi);
    return {d2 * c - 2 * d1 * s - rho * c, d2 * s + 2 * d1 * c - rho * s};
  }

  bool contains_star(const Point& x) const {
    const Point r = x - center_;
    const double n = norm(r);
    if (n == 0.0) return true;
    return n < radial_graph(std::atan2(r[1], r[0]));
  }

  void sample_boundary() {
    const int n = 4096;
    max_curvature_ = 0.0;
    for (int i = 0; i < n; ++i) {
      const double phi = -std::numbers::pi + 2 * std::numbers::pi * (i + 0.5) / n;
      const double rho = radial_graph(phi);
      const double d1 = radius_ * amplitude_ * bump(phi, 1);
      const double d2 = radius_ * amplitude_ * bump(phi, 2);
      const double kappa = (rho * rho + 2 * d1 * d1 - rho * d2) / std::pow(rho * rho + d1 * d1, 1.5);
      max_curvature_ = std::max(max_curvature_, std::abs(kappa));
    }
  }

  // Global minimiser of |x - b(phi)| by dense sampling and safeguarded Newton.
  std::pair<double, double> closest_parameter(const Point& x) const {
    constexpr int n = 2048;
    const double h = 2 * std::numbers::pi / n;
    std::vector<double> dist(n);
    for (int i = 0; i < n; ++i) dist[i] = norm(x - boundary_point(-std::numbers::pi + i * h));
    // Refine every sampled local minimum within 1% of the best sample.
    const double best_sample = *std::min_element(dist.begin(), dist.end());
    double best_phi = 0.0, best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double prev = dist[(i + n - 1) % n], next = dist[(i + 1) % n];
      if (dist[i] > prev || dist[i] > next || dist[i] > best_sample * 1.01 + 1e-12) continue;
      double phi = -std::numbers::pi + i * h;
      double lo = phi - h, hi = phi + h;
      for (int it = 0; it < 60; ++it) {
        const Point r = x - boundary_point(phi);
        const Point b1 = tangent(phi), b2 = second_derivative(phi);
        const double g1 = -dot(r, b1);
        const double g2 = dot(b1, b1) - dot(r, b2);
        double step = (g2 > 0) ? -g1 / g2 : (g1 > 0 ? -0.5 * (phi - lo) : 0.5 * (hi - phi));
        double next_phi = phi + step;
        if (next_phi <= lo || next_phi >= hi) next_phi = 0.5 * (phi + (step > 0 ? hi : lo));
        if (g1 > 0) hi = phi; else lo = phi;
        if (std::abs(next_phi - phi) < 1e-15) {
          phi = next_phi;
          break;
        }
        phi = next_phi;
      }
      const double d = norm(x - boundary_point(phi));
      if (d < best) best = d, best_phi = phi;
    }
    return {best_phi, best};
  }

  DomainKind kind_;
  int dim_;
  double lo_ = 0.0, hi_ = 0.0;
  Point center_{0.0, 0.0};
  Point normal_{1.0, 0.0};
  double radius_ = 0.0;
  double amplitude_ = 0.0;
  double width_ = 1.0;
  double max_curvature_ = 0.0;
};

/// bar-delta_{x0,nu}(x) = [(x - x0) . nu]_+.
inline double linearized_delta(const Point& x, const Point& x0, const Point& nu) {
  if (std::abs(norm(nu) - 1.0) > 1e-12) throw std::invalid_argument("normal must have unit length");
  return std::max(0.0, dot(x - x0, nu));
}

}  // namespace csxlab
