#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace csxlab {

/// A point of the trace space R^N, N in {1,2}. For N = 1 the second
/// coordinate is kept at zero so distances work uniformly.
using Point = std::array<double, 2>;

/// A point (t, x1, x2) of the closed upper half-space.
using ZPoint = std::array<double, 3>;

inline double norm(const Point& p) { return std::hypot(p[0], p[1]); }
inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1]; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Point operator*(double c, const Point& a) { return {c * a[0], c * a[1]}; }

inline double distance(const ZPoint& a, const ZPoint& b) {
  const double d0 = a[0] - b[0], d1 = a[1] - b[1], d2 = a[2] - b[2];
  return std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
}

inline ZPoint lift(double t, const Point& x) { return {t, x[0], x[1]}; }

// Error hierarchy. Every failure the library reports derives from Error.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct QuadratureError : Error {
  QuadratureError(const std::string& what, double achieved)
      : Error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
        achieved_error(achieved) {}
  double achieved_error;
};
struct NonSmoothError : Error {
  using Error::Error;
};
struct GeometryError : Error {
  using Error::Error;
};
struct SolverError : Error {
  SolverError(const std::string& what, double residual)
      : Error(what + " (relative residual " + std::to_string(residual) + ")"), residual(residual) {}
  double residual;
};
struct ProjectionError : Error {
  using Error::Error;
};

/// Fractional order s in (0,1) together with the trace dimension N.
class FracOrder {
 public:
  explicit FracOrder(double s, int dim = 1) : s_(s), dim_(dim) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("fractional order must lie in (0,1)");
    if (dim != 1 && dim != 2) throw std::invalid_argument("dimension must be 1 or 2");
  }

  double s() const { return s_; }
  int dim() const { return dim_; }
  /// Exponent a of the weight t^a, a = 1 - 2s.
  double weight_exponent() const { return 1.0 - 2.0 * s_; }

  FracOrder with_dim(int dim) const { return FracOrder(s_, dim); }

 private:
  double s_;
  int dim_;
};

}  // namespace csxlab
