#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "csxlab/order.hpp"
#include "csxlab/quadrature.hpp"

namespace csxlab {

/// B_r^+(x0) = [0, r) x B_r(x0). `axis` is the direction of the edge line
/// through x0 (N = 2); polar nodes are placed on it.
struct HalfBall {
  Point center{0.0, 0.0};
  double r = 1.0;
  Point axis{0.0, 1.0};
};

/// [0, T] x [lo, hi] (a box for N = 2). Nodes cluster at the listed coordinates.
struct Slab {
  double T = 1.0;
  Point lo{-1.0, -1.0};
  Point hi{1.0, 1.0};
  std::vector<double> x_clusters;
  std::vector<double> y_clusters;
};

/// [0, T] x closed disk of radius R (N = 2), polar nodes clustered at the rim.
struct DiskSlab {
  double T = 1.0;
  Point center{0.0, 0.0};
  double R = 1.0;
};

using Region = std::variant<HalfBall, Slab, DiskSlab>;

enum class XLayout { cartesian, polar };

/// ∫_a^b t^p dt for p > -1, a, b >= 0.
inline double power_integral(double a, double b, double p) {
  return (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / (p + 1.0);
}

/// Hat-function weights ∫ t^p φ_j dt on the nodes t (t_0 may be 0).
inline std::vector<double> weighted_hat_weights(const std::vector<double>& t, double p) {
  const std::size_t n = t.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double a = t[j], b = t[j + 1], h = b - a;
    const double m0 = power_integral(a, b, p), m1 = power_integral(a, b, p + 1.0);
    // φ_{j+1} = (t - a)/h, φ_j = (b - t)/h on [a, b]
    const double right = (m1 - a * m0) / h;
    w[j + 1] += right;
    w[j] += m0 - right;
  }
  return w;
}

/// Nodes t_j = T (j/M)^gamma, j = 0..M.
inline std::vector<double> graded_nodes(double T, int M, double gamma) {
  std::vector<double> t(M + 1);
  for (int j = 0; j <= M; ++j) t[j] = T * std::pow(double(j) / M, gamma);
  t[M] = T;
  return t;
}

/// n+1 nodes on [a, b], graded toward each cluster point with exponent gamma.
/// Between two clusters the segment is split at the midpoint.
inline std::vector<double> clustered_axis(double a, double b, std::vector<double> clusters, int n, double gamma) {
  std::erase_if(clusters, [&](double c) { return c < a || c > b; });
  std::sort(clusters.begin(), clusters.end());
  clusters.erase(std::unique(clusters.begin(), clusters.end()), clusters.end());
  if (clusters.empty()) {
    std::vector<double> x(n + 1);
    for (int i = 0; i <= n; ++i) x[i] = a + (b - a) * double(i) / n;
    x[n] = b;
    return x;
  }
  struct Piece {
    double from, to;  // graded toward `from`
  };
  std::vector<Piece> pieces;
  if (clusters.front() > a) pieces.push_back({clusters.front(), a});
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    const double c = clusters[k];
    if (k > 0) pieces.push_back({c, 0.5 * (clusters[k - 1] + c)});
    if (k + 1 < clusters.size()) pieces.push_back({c, 0.5 * (c + clusters[k + 1])});
  }
  if (clusters.back() < b) pieces.push_back({clusters.back(), b});
  double total = 0.0;
  for (auto& p : pieces) total += std::abs(p.to - p.from);
  std::vector<double> x;
  for (auto& p : pieces) {
    const double len = std::abs(p.to - p.from);
    const int m = std::max(2, int(std::lround(n * len / total)));
    for (int i = 0; i <= m; ++i) x.push_back(p.from + (p.to - p.from) * std::pow(double(i) / m, gamma));
  }
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end(), [](double u, double v) { return std::abs(u - v) < 1e-14; }), x.end());
  x.front() = a;
  x.back() = b;
  return x;
}

/// Default grading exponent 2/min(2s, 1), clipped to [1, 6].
inline double default_grading(const FracOrder& order) {
  return std::clamp(2.0 / std::min(2.0 * order.s(), 1.0), 1.0, 6.0);
}

/// Tensor grid {t_j} x {x_i} on a region of the closed upper half-space, with
/// quadrature weights for the measure t^{1-2s} dt dx. Point k = j * nx + i.
class WeightedGrid {
 public:
  WeightedGrid(const FracOrder& order, std::vector<double> t, XLayout layout, std::vector<Point> xs,
               std::vector<double> x_weights)
      : order_(order), t_(std::move(t)), layout_(layout), x_(std::move(xs)), wx_(std::move(x_weights)) {
    if (t_.size() < 2 || t_.front() != 0.0) throw std::invalid_argument("t nodes must start at 0");
    for (std::size_t j = 1; j < t_.size(); ++j)
      if (!(t_[j] > t_[j - 1])) throw std::invalid_argument("t nodes must increase");
    wt_ = weighted_hat_weights(t_, order_.weight_exponent());
    vt_ = weighted_hat_weights(t_, 0.0);
  }

  static WeightedGrid cartesian(const FracOrder& order, std::vector<double> t, std::vector<double> xs,
                                std::vector<double> ys = {0.0}) {
    const auto wxs = weighted_hat_weights_shifted(xs);
    const auto wys = ys.size() > 1 ? weighted_hat_weights_shifted(ys) : std::vector<double>{1.0};
    std::vector<Point> pts;
    std::vector<double> w;
    for (std::size_t iy = 0; iy < ys.size(); ++iy)
      for (std::size_t ix = 0; ix < xs.size(); ++ix) {
        pts.push_back({xs[ix], ys[iy]});
        w.push_back(wxs[ix] * wys[iy]);
      }
    WeightedGrid g(order, std::move(t), XLayout::cartesian, std::move(pts), std::move(w));
    g.axis_x_ = std::move(xs);
    g.axis_y_ = std::move(ys);
    return g;
  }

  /// Polar x layout: rho nodes (rho_0 = 0) times n_phi angles phi0 + 2πk/n_phi.
  /// The centre appears n_phi times, each carrying 1/n_phi of its weight.
  static WeightedGrid polar(const FracOrder& order, std::vector<double> t, Point center, std::vector<double> rho,
                            int n_phi, double phi0) {
    if (rho.front() != 0.0) throw std::invalid_argument("polar rho nodes must start at 0");
    const auto wr = weighted_hat_weights(rho, 1.0);
    const double dphi = 2 * std::numbers::pi / n_phi;
    std::vector<Point> pts;
    std::vector<double> w;
    for (std::size_t ir = 0; ir < rho.size(); ++ir)
      for (int k = 0; k < n_phi; ++k) {
        const double phi = phi0 + k * dphi;
        pts.push_back(center + Point{rho[ir] * std::cos(phi), rho[ir] * std::sin(phi)});
        w.push_back(wr[ir] * dphi);
      }
    WeightedGrid g(order, std::move(t), XLayout::polar, std::move(pts), std::move(w));
    g.axis_x_ = std::move(rho);
    g.n_phi_ = n_phi;
    g.phi0_ = phi0;
    g.center_ = center;
    return g;
  }

  const FracOrder& order() const { return order_; }
  XLayout layout() const { return layout_; }
  std::size_t nt() const { return t_.size(); }
  std::size_t nx() const { return x_.size(); }
  std::size_t size() const { return nt() * nx(); }
  const std::vector<double>& t_nodes() const { return t_; }
  const std::vector<Point>& x_nodes() const { return x_; }
  /// Cartesian: x axis; polar: rho axis.
  const std::vector<double>& axis_x() const { return axis_x_; }
  const std::vector<double>& axis_y() const { return axis_y_; }
  int n_phi() const { return n_phi_; }
  double phi0() const { return phi0_; }
  Point center() const { return center_; }

  double t(std::size_t k) const { return t_[k / nx()]; }
  const Point& x(std::size_t k) const { return x_[k % nx()]; }
  ZPoint point(std::size_t k) const { return lift(t(k), x(k)); }
  std::size_t index(std::size_t j, std::size_t i) const { return j * nx() + i; }

  /// Weight of node k for t^{1-2s} dt dx.
  double weight(std::size_t k) const { return wt_[k / nx()] * wx_[k % nx()]; }
  /// Weight of node k for dt dx.
  double volume(std::size_t k) const { return vt_[k / nx()] * wx_[k % nx()]; }
  const std::vector<double>& t_weights() const { return wt_; }
  const std::vector<double>& t_volumes() const { return vt_; }
  const std::vector<double>& x_weights() const { return wx_; }

  double total_weight() const {
    std::vector<double> w(size());
    for (std::size_t k = 0; k < size(); ++k) w[k] = weight(k);
    return quad::pairwise_sum(w);
  }

  /// Smallest spacing in t and in x; used as the resolution floor.
  double min_spacing() const {
    double h = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < t_.size(); ++j) h = std::min(h, t_[j] - t_[j - 1]);
    for (std::size_t i = 1; i < axis_x_.size(); ++i) h = std::min(h, axis_x_[i] - axis_x_[i - 1]);
    return h;
  }
  /// Largest spacing over t and the x axes.
  double max_spacing() const {
    double h = 0.0;
    for (std::size_t j = 1; j < t_.size(); ++j) h = std::max(h, t_[j] - t_[j - 1]);
    for (std::size_t i = 1; i < axis_x_.size(); ++i) h = std::max(h, axis_x_[i] - axis_x_[i - 1]);
    for (std::size_t i = 1; i < axis_y_.size(); ++i) h = std::max(h, axis_y_[i] - axis_y_[i - 1]);
    return h;
  }

 private:
  static std::vector<double> weighted_hat_weights_shifted(const std::vector<double>& x) {
    std::vector<double> w(x.size(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double h = x[i + 1] - x[i];
      w[i] += 0.5 * h;
      w[i + 1] += 0.5 * h;
    }
    return w;
  }

  FracOrder order_;
  std::vector<double> t_, wt_, vt_;
  XLayout layout_;
  std::vector<Point> x_;
  std::vector<double> wx_;
  std::vector<double> axis_x_, axis_y_{0.0};
  int n_phi_ = 0;
  double phi0_ = 0.0;
  Point center_{0.0, 0.0};
};

using GridPtr = std::shared_ptr<const WeightedGrid>;

/// Builds a grid over a region with `resolution` nodes per direction and t
/// grading gamma (nullopt selects the default for the order).
inline GridPtr graded_grid(const Region& region, const FracOrder& order, int resolution,
                           std::optional<double> gamma = std::nullopt) {
  if (resolution < 8) throw std::invalid_argument("resolution must be at least 8 nodes per direction");
  const double g = gamma.value_or(default_grading(order));
  if (g < 1.0) throw std::invalid_argument("grading exponent must be >= 1");
  const int M = resolution;
  return std::visit(
      [&](const auto& reg) -> GridPtr {
        using R = std::decay_t<decltype(reg)>;
        if constexpr (std::is_same_v<R, HalfBall>) {
          if (!(reg.r > 0)) throw std::invalid_argument("half-ball radius must be positive");
          auto t = graded_nodes(reg.r, M, g);
          if (order.dim() == 1) {
            auto xs = clustered_axis(reg.center[0] - reg.r, reg.center[0] + reg.r, {reg.center[0]}, 2 * M, g);
            return std::make_shared<WeightedGrid>(WeightedGrid::cartesian(order, std::move(t), std::move(xs)));
          }
          auto rho = graded_nodes(reg.r, M, std::min(g, 2.0));
          const int n_phi = 4 * ((M + 1) / 2);
          const double phi0 = std::atan2(reg.axis[1], reg.axis[0]);
          return std::make_shared<WeightedGrid>(
              WeightedGrid::polar(order, std::move(t), reg.center, std::move(rho), n_phi, phi0));
        } else if constexpr (std::is_same_v<R, Slab>) {
          auto t = graded_nodes(reg.T, M, g);
          auto xs = clustered_axis(reg.lo[0], reg.hi[0], reg.x_clusters, 2 * M, g);
          if (order.dim() == 1) {
            return std::make_shared<WeightedGrid>(WeightedGrid::cartesian(order, std::move(t), std::move(xs)));
          }
          auto ys = clustered_axis(reg.lo[1], reg.hi[1], reg.y_clusters, 2 * M, g);
          return std::make_shared<WeightedGrid>(
              WeightedGrid::cartesian(order, std::move(t), std::move(xs), std::move(ys)));
        } else {
          if (order.dim() != 2) throw std::invalid_argument("disk slab requires N = 2");
          auto t = graded_nodes(reg.T, M, g);
          // rho graded toward the rim
          auto rim = graded_nodes(reg.R, M, g);
          std::vector<double> rho(rim.size());
          for (std::size_t i = 0; i < rim.size(); ++i) rho[i] = reg.R - rim[rim.size() - 1 - i];
          rho.front() = 0.0;
          return std::make_shared<WeightedGrid>(
              WeightedGrid::polar(order, std::move(t), reg.center, std::move(rho), 4 * M, 0.0));
        }
      },
      region);
}

/// A field sampled on a WeightedGrid.
class ExtensionField {
 public:
  ExtensionField() = default;
  ExtensionField(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), v_(std::move(values)) {
    if (v_.size() != grid_->size()) throw std::invalid_argument("field size does not match grid");
  }
  explicit ExtensionField(GridPtr grid) : grid_(std::move(grid)), v_(grid_->size(), 0.0) {}

  template <class F>
  static ExtensionField sample(GridPtr grid, F&& f) {
    std::vector<double> v(grid->size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(grid->t(k), grid->x(k));
    return {std::move(grid), std::move(v)};
  }

  const GridPtr& grid() const { return grid_; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }
  double operator[](std::size_t k) const { return v_[k]; }
  double& operator[](std::size_t k) { return v_[k]; }
  std::size_t size() const { return v_.size(); }

  double sup_norm() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

  /// Trace values at t = 0, one per x node.
  std::vector<double> trace() const { return {v_.begin(), v_.begin() + grid_->nx()}; }

  /// Multilinear interpolation on a Cartesian grid. Throws outside the grid.
  double interpolate(double t, const Point& x) const {
    const auto& g = *grid_;
    if (g.layout() != XLayout::cartesian) throw std::invalid_argument("interpolation needs a Cartesian grid");
    auto locate = [](const std::vector<double>& a, double v, std::size_t& i, double& w) {
      const double tol = 1e-12 * std::max(1.0, std::abs(a.back() - a.front()));
      if (v < a.front() - tol || v > a.back() + tol) throw std::out_of_range("point outside the grid");
      if (a.size() == 1) {
        i = 0;
        w = 0.0;
        return;
      }
      auto it = std::upper_bound(a.begin(), a.end(), v);
      i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - a.begin() - 1, 0), a.size() - 2);
      w = std::clamp((v - a[i]) / (a[i + 1] - a[i]), 0.0, 1.0);
    };
    std::size_t j, ix, iy;
    double wt, wx, wy;
    locate(g.t_nodes(), t, j, wt);
    locate(g.axis_x(), x[0], ix, wx);
    locate(g.axis_y(), x[1], iy, wy);
    const std::size_t nxa = g.axis_x().size();
    const std::size_t j1 = g.nt() > 1 ? j + 1 : j;
    const std::size_t ix1 = nxa > 1 ? ix + 1 : ix;
    const std::size_t iy1 = g.axis_y().size() > 1 ? iy + 1 : iy;
    auto at = [&](std::size_t jj, std::size_t xx, std::size_t yy) { return v_[g.index(jj, yy * nxa + xx)]; };
    auto plane = [&](std::size_t jj) {
      const double lo = (1 - wx) * at(jj, ix, iy) + wx * at(jj, ix1, iy);
      const double hi = (1 - wx) * at(jj, ix, iy1) + wx * at(jj, ix1, iy1);
      return (1 - wy) * lo + wy * hi;
    };
    return (1 - wt) * plane(j) + wt * plane(j1);
  }

  ExtensionField& operator+=(const ExtensionField& o) {
    check(o);
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
    return *this;
  }
  ExtensionField& operator-=(const ExtensionField& o) {
    check(o);
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
    return *this;
  }
  ExtensionField& operator*=(double c) {
    for (double& x : v_) x *= c;
    return *this;
  }
  friend ExtensionField operator+(ExtensionField a, const ExtensionField& b) { return a += b; }
  friend ExtensionField operator-(ExtensionField a, const ExtensionField& b) { return a -= b; }
  friend ExtensionField operator*(double c, ExtensionField a) { return a *= c; }

 private:
  void check(const ExtensionField& o) const {
    if (grid_ != o.grid_) throw std::invalid_argument("fields live on different grids");
  }

  GridPtr grid_;
  std::vector<double> v_;
};

/// Σ w_k F_k G_k, the discrete ∫ t^{1-2s} F G.
inline double weighted_inner(const ExtensionField& F, const ExtensionField& G) {
  if (F.grid() != G.grid()) throw std::invalid_argument("fields live on different grids");
  const auto& g = *F.grid();
  std::vector<double> terms(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) terms[k] = g.weight(k) * F[k] * G[k];
  return quad::pairwise_sum(terms);
}

/// Discrete ∫ t^{1-2s} |∇F|^2 with the lumped bilinear element energy
/// (exact t-weight per cell, lumped mass in the transverse directions).
inline double weighted_h1_energy(const ExtensionField& F) {
  const auto& g = *F.grid();
  if (g.layout() != XLayout::cartesian) throw std::invalid_argument("energy needs a Cartesian grid");
  const auto& t = g.t_nodes();
  const auto& xs = g.axis_x();
  const auto& ys = g.axis_y();
  const double a = g.order().weight_exponent();
  const std::size_t nxa = xs.size(), nya = ys.size(), nx = g.nx();
  auto hat = [](const std::vector<double>& z) {
    std::vector<double> w(z.size(), z.size() == 1 ? 1.0 : 0.0);
    for (std::size_t i = 0; i + 1 < z.size(); ++i) w[i] += 0.5 * (z[i + 1] - z[i]), w[i + 1] += 0.5 * (z[i + 1] - z[i]);
    return w;
  };
  const auto mx = hat(xs), my = hat(ys);
  const auto& mt = g.t_weights();
  std::vector<double> terms;
  terms.reserve(3 * g.size());
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    const double A = power_integral(t[j], t[j + 1], a) / std::pow(t[j + 1] - t[j], 2);
    for (std::size_t i = 0; i < nx; ++i) {
      const double d = F[g.index(j + 1, i)] - F[g.index(j, i)];
      terms.push_back(A * d * d * mx[i % nxa] * my[i / nxa]);
    }
  }
  for (std::size_t j = 0; j < t.size(); ++j) {
    for (std::size_t iy = 0; iy < nya; ++iy)
      for (std::size_t ix = 0; ix + 1 < nxa; ++ix) {
        const double d = F[g.index(j, iy * nxa + ix + 1)] - F[g.index(j, iy * nxa + ix)];
        terms.push_back(mt[j] * my[iy] * d * d / (xs[ix + 1] - xs[ix]));
      }
    for (std::size_t iy = 0; iy + 1 < nya; ++iy)
      for (std::size_t ix = 0; ix < nxa; ++ix) {
        const double d = F[g.index(j, (iy + 1) * nxa + ix)] - F[g.index(j, iy * nxa + ix)];
        terms.push_back(mt[j] * mx[ix] * d * d / (ys[iy + 1] - ys[iy]));
      }
  }
  return quad::pairwise_sum(terms);
}

inline double weighted_h1_seminorm(const ExtensionField& F) { return std::sqrt(weighted_h1_energy(F)); }

/// Ball in R^{N+1} = {(t, x)}; t may be negative.
struct ZBall {
  double t = 0.0;
  Point x{0.0, 0.0};
  double radius = 1.0;
};

/// (avg_B |t|^{1-2s}) (avg_B |t|^{2s-1}). Both averages use the same slice
/// quadrature, so the product is exactly 1 when the weight is constant.
inline double a2_product(const ZBall& ball, const FracOrder& order) {
  const double R = ball.radius, tc = ball.t;
  if (!(R > 0)) throw std::invalid_argument("ball radius must be positive");
  const int N = order.dim();
  // ∫_{-R}^{R} |tc + u|^p V_N(sqrt(R^2 - u^2)) du, split where tc + u = 0.
  auto slice_integral = [&](double p) {
    const double u0 = -tc;
    auto piece = [&](double lo, double hi) {
      auto f = [&](double u, double dl, double du) {
        const double left = (lo == -R) ? dl : u + R;
        const double right = (hi == R) ? du : R - u;
        double at = std::abs(tc + u);
        if (lo == u0) at = dl;
        if (hi == u0) at = du;
        const double q = left * right;
        const double vol = N == 1 ? 2.0 * std::sqrt(q) : std::numbers::pi * q;
        return (p == 0.0 ? 1.0 : std::pow(at, p)) * vol;
      };
      return quad::integrate(f, lo, hi, 1e-13, 1e-9).value;
    };
    if (u0 > -R && u0 < R) return piece(-R, u0) + piece(u0, R);
    return piece(-R, R);
  };
  const double a = order.weight_exponent();
  const double vol = slice_integral(0.0);
  if (a == 0.0) return (vol / vol) * (vol / vol);
  return (slice_integral(a) / vol) * (slice_integral(-a) / vol);
}

}  // namespace csxlab
