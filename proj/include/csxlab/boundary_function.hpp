#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "csxlab/order.hpp"

namespace csxlab {

enum class DecayClass {
  compact_support,  ///< vanishes outside a ball
  bounded_growth,   ///< |u(x)| <= C (1 + |x|)^beta with beta < 2s
};

/// Circle along which a 2-D boundary function fails to be smooth.
struct KinkCircle {
  Point center;
  double radius;
};

/// Line {(x - point) . normal = 0} along which a 2-D boundary function fails to be smooth.
struct KinkLine {
  Point point;
  Point normal;
};

/// A scalar function on R^N with its decay class and the locations where it
/// is not smooth. Kinks only steer quadrature break points; evaluation never
/// depends on them.
class BoundaryFunction {
 public:
  using Evaluator = std::function<double(const Point&)>;

  BoundaryFunction() = default;

  static BoundaryFunction compact(Evaluator f, Point center, double support_radius) {
    BoundaryFunction u;
    u.eval_ = std::make_shared<Evaluator>(std::move(f));
    u.decay_ = DecayClass::compact_support;
    u.support_center_ = center;
    u.support_radius_ = support_radius;
    return u;
  }

  static BoundaryFunction growing(Evaluator f, double beta) {
    BoundaryFunction u;
    u.eval_ = std::make_shared<Evaluator>(std::move(f));
    u.decay_ = DecayClass::bounded_growth;
    u.growth_ = beta;
    return u;
  }

  BoundaryFunction with_kinks(std::vector<double> points) && {
    kinks_1d_ = std::move(points);
    return std::move(*this);
  }
  BoundaryFunction with_kink_circles(std::vector<KinkCircle> circles) && {
    kink_circles_ = std::move(circles);
    return std::move(*this);
  }
  BoundaryFunction with_kink_lines(std::vector<KinkLine> lines) && {
    kink_lines_ = std::move(lines);
    return std::move(*this);
  }
  /// Declares u(x) = g(|x - c|); extensions then depend on (t, |x - c|) only.
  BoundaryFunction radial_about(Point c) && {
    radial_center_ = c;
    return std::move(*this);
  }

  /// c u, keeping decay class, kinks and symmetry.
  BoundaryFunction scaled(double c) const {
    BoundaryFunction w = *this;
    auto f = eval_;
    w.eval_ = std::make_shared<Evaluator>([=](const Point& x) { return c * (*f)(x); });
    return w;
  }

  double operator()(const Point& x) const { return (*eval_)(x); }
  explicit operator bool() const { return static_cast<bool>(eval_); }

  DecayClass decay() const { return decay_; }
  double growth_exponent() const { return growth_; }
  Point support_center() const { return support_center_; }
  double support_radius() const { return support_radius_; }
  const std::vector<double>& kinks() const { return kinks_1d_; }
  const std::vector<KinkCircle>& kink_circles() const { return kink_circles_; }
  const std::vector<KinkLine>& kink_lines() const { return kink_lines_; }
  const std::optional<Point>& radial_center() const { return radial_center_; }

  /// Distance from x to the nearest declared kink (infinity if none).
  double kink_distance(const Point& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (double k : kinks_1d_) d = std::min(d, std::abs(x[0] - k));
    for (const auto& c : kink_circles_) d = std::min(d, std::abs(norm(x - c.center) - c.radius));
    for (const auto& l : kink_lines_) d = std::min(d, std::abs(dot(x - l.point, l.normal)) / norm(l.normal));
    return d;
  }

  /// True when u belongs to the class L_s: finite integral of |u|/(1+|x|^{N+2s}).
  bool integrable_for(const FracOrder& order) const {
    return decay_ == DecayClass::compact_support || growth_ < 2.0 * order.s();
  }

  void require_integrable(const FracOrder& order) const {
    if (!integrable_for(order)) {
      throw std::invalid_argument("boundary function grows too fast for the extension (need beta < 2s)");
    }
  }

  /// a u + b v. Kinks are merged and the weaker decay class is kept.
  static BoundaryFunction combine(double a, const BoundaryFunction& u, double b, const BoundaryFunction& v) {
    auto fu = u.eval_, fv = v.eval_;
    BoundaryFunction w;
    w.eval_ = std::make_shared<Evaluator>([=](const Point& x) { return a * (*fu)(x) + b * (*fv)(x); });
    if (u.decay_ == DecayClass::compact_support && v.decay_ == DecayClass::compact_support) {
      w.decay_ = DecayClass::compact_support;
      const double du = norm(u.support_center_ - v.support_center_);
      w.support_center_ = u.support_center_;
      w.support_radius_ = std::max(u.support_radius_, du + v.support_radius_);
    } else {
      w.decay_ = DecayClass::bounded_growth;
      w.growth_ = std::max(u.decay_ == DecayClass::bounded_growth ? u.growth_ : 0.0,
                           v.decay_ == DecayClass::bounded_growth ? v.growth_ : 0.0);
    }
    auto append = [](auto& dst, const auto& src) { dst.insert(dst.end(), src.begin(), src.end()); };
    w.kinks_1d_ = u.kinks_1d_;
    append(w.kinks_1d_, v.kinks_1d_);
    w.kink_circles_ = u.kink_circles_;
    append(w.kink_circles_, v.kink_circles_);
    w.kink_lines_ = u.kink_lines_;
    append(w.kink_lines_, v.kink_lines_);
    if (u.radial_center_ && v.radial_center_ && *u.radial_center_ == *v.radial_center_) w.radial_center_ = u.radial_center_;
    return w;
  }

 private:
  std::shared_ptr<const Evaluator> eval_;
  DecayClass decay_ = DecayClass::compact_support;
  double growth_ = 0.0;
  Point support_center_{0.0, 0.0};
  double support_radius_ = 0.0;
  std::vector<double> kinks_1d_;
  std::vector<KinkCircle> kink_circles_;
  std::vector<KinkLine> kink_lines_;
  std::optional<Point> radial_center_;
};

// Reference profiles used throughout the suites.

/// (R^2 - |x - c|^2)_+^s, the profile of the ball problem with constant data.
inline BoundaryFunction ball_profile(const FracOrder& order, Point center = {0.0, 0.0}, double radius = 1.0) {
  const double s = order.s();
  auto f = [=](const Point& x) {
    const double q = radius * radius - std::pow(norm(x - center), 2);
    return q > 0 ? std::pow(q, s) : 0.0;
  };
  auto u = BoundaryFunction::compact(f, center, radius);
  if (order.dim() == 1) return std::move(u).with_kinks({center[0] - radius, center[0] + radius});
  return std::move(u).with_kink_circles({{center, radius}}).radial_about(center);
}

/// max((x - x0) . nu, 0)^s, the trace of the half-space barrier.
inline BoundaryFunction halfspace_profile(const FracOrder& order, Point x0, Point nu) {
  const double s = order.s();
  auto f = [=](const Point& x) {
    const double r = dot(x - x0, nu);
    return r > 0 ? std::pow(r, s) : 0.0;
  };
  auto u = BoundaryFunction::growing(f, s);
  if (order.dim() == 1) return std::move(u).with_kinks({x0[0]});
  return std::move(u).with_kink_lines({{x0, nu}});
}

/// exp(-|x|^2 / (2 sigma^2)).
inline BoundaryFunction gaussian(double sigma = 1.0) {
  return BoundaryFunction::growing([=](const Point& x) { return std::exp(-0.5 * dot(x, x) / (sigma * sigma)); }, 0.0)
      .radial_about({0.0, 0.0});
}

/// (1 + |x|^2)^{-1}.
inline BoundaryFunction lorentzian() {
  return BoundaryFunction::growing([](const Point& x) { return 1.0 / (1.0 + dot(x, x)); }, 0.0)
      .radial_about({0.0, 0.0});
}

/// The constant function c.
inline BoundaryFunction constant_function(double c) {
  return BoundaryFunction::growing([=](const Point&) { return c; }, 0.0);
}

/// Constant of the ball solution: (-Delta)^s [c (1 - |x|^2)_+^s] = 1 in B_1,
/// c = Gamma(N/2) / (4^s Gamma(1+s) Gamma(N/2+s)).
inline double ball_solution_constant(const FracOrder& order) {
  const double s = order.s(), h = 0.5 * order.dim();
  return std::tgamma(h) / (std::pow(4.0, s) * std::tgamma(1.0 + s) * std::tgamma(h + s));
}

/// u = c (1 - |x|^2)_+^s, the solution of (-Delta)^s u = 1 in B_1, u = 0 outside.
inline BoundaryFunction ball_solution(const FracOrder& order) {
  return ball_profile(order).scaled(ball_solution_constant(order));
}

}  // namespace csxlab
