#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "csxlab/boundary_function.hpp"
#include "csxlab/geometry.hpp"
#include "csxlab/kernels.hpp"
#include "csxlab/order.hpp"
#include "csxlab/parallel.hpp"
#include "csxlab/weighted_grid.hpp"

namespace csxlab {

enum class LateralData { zero, poisson_extension };

/// M_s W = 0 in (0, T) x X, -lim t^{1-2s} ∂_t W = f on Ω (weakly, with k_s),
/// W = 0 on X \ Ω at t = 0, and W given on the lateral and top faces.
/// Without a geometry the whole trace plane is Neumann.
struct MixedProblem {
  std::optional<DomainGeometry> geometry;
  BoundaryFunction f;
  FracOrder order{0.5, 1};
  Slab box;
  LateralData lateral = LateralData::zero;
  BoundaryFunction lateral_trace;  ///< trace whose extension supplies the lateral/top values
  std::optional<double> ks;        ///< Neumann constant; calibrated when absent
  double truncation_tolerance = std::numeric_limits<double>::infinity();
};

struct SolveInfo {
  double ks = 0.0;
  double relative_residual = 0.0;
  double truncation_estimate = 0.0;
  int iterations = 0;
};

namespace detail {

struct Axes {
  std::vector<double> t, x, y;
  std::vector<double> mt, mx, my;  // lumped masses, mt carries t^{1-2s}
  std::vector<double> kt;          // per t-cell: ∫ t^{1-2s} / h^2
};

inline Axes solver_axes(const WeightedGrid& g) {
  if (g.layout() != XLayout::cartesian) throw std::invalid_argument("solver needs a Cartesian grid");
  Axes a;
  a.t = g.t_nodes();
  a.x = g.axis_x();
  a.y = g.axis_y();
  auto hat = [](const std::vector<double>& z) {
    std::vector<double> w(z.size(), z.size() == 1 ? 1.0 : 0.0);
    for (std::size_t i = 0; i + 1 < z.size(); ++i) w[i] += 0.5 * (z[i + 1] - z[i]), w[i + 1] += 0.5 * (z[i + 1] - z[i]);
    return w;
  };
  a.mx = hat(a.x);
  a.my = hat(a.y);
  a.mt = g.t_weights();
  const double p = g.order().weight_exponent();
  for (std::size_t j = 0; j + 1 < a.t.size(); ++j)
    a.kt.push_back(power_integral(a.t[j], a.t[j + 1], p) / std::pow(a.t[j + 1] - a.t[j], 2));
  return a;
}

/// Lumped tensor-product stiffness: Kt⊗Mx⊗My + Mt⊗Kx⊗My + Mt⊗Mx⊗Ky.
/// Off-diagonal entries are nonpositive, so the matrix is an M-matrix once
/// Dirichlet rows are removed.
inline Eigen::SparseMatrix<double> stiffness(const WeightedGrid& g) {
  const Axes a = solver_axes(g);
  const std::size_t nxa = a.x.size(), nya = a.y.size(), nx = g.nx(), nt = a.t.size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(g.size() * 7);
  auto add_edge = [&](std::size_t p, std::size_t q, double c) {
    trip.emplace_back(p, p, c);
    trip.emplace_back(q, q, c);
    trip.emplace_back(p, q, -c);
    trip.emplace_back(q, p, -c);
  };
  for (std::size_t j = 0; j < nt; ++j)
    for (std::size_t iy = 0; iy < nya; ++iy)
      for (std::size_t ix = 0; ix < nxa; ++ix) {
        const std::size_t i = iy * nxa + ix, k = j * nx + i;
        if (j + 1 < nt) add_edge(k, k + nx, a.kt[j] * a.mx[ix] * a.my[iy]);
        if (ix + 1 < nxa) add_edge(k, k + 1, a.mt[j] * a.my[iy] / (a.x[ix + 1] - a.x[ix]));
        if (iy + 1 < nya) add_edge(k, k + nxa, a.mt[j] * a.mx[ix] / (a.y[iy + 1] - a.y[iy]));
      }
  Eigen::SparseMatrix<double> K(g.size(), g.size());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

/// Lumped trace measure of x node i.
inline double trace_mass(const Axes& a, std::size_t i) {
  const std::size_t nxa = a.x.size();
  return a.mx[i % nxa] * a.my[i / nxa];
}

inline bool on_lateral(const Axes& a, std::size_t i) {
  const std::size_t nxa = a.x.size(), ix = i % nxa, iy = i / nxa;
  if (ix == 0 || ix + 1 == nxa) return true;
  if (a.y.size() > 1 && (iy == 0 || iy + 1 == a.y.size())) return true;
  return false;
}

}  // namespace detail

struct KsCalibration {
  double ks = 0.0;
  std::vector<double> per_function;  ///< one value per reference function
  double spread = 0.0;               ///< max relative deviation from the mean
  bool stable = false;               ///< spread within 1%
};

struct NeumannTrace {
  std::vector<Point> x;
  std::vector<double> value;   ///< limit of -t^{1-2s} ∂_t W
  std::vector<double> misfit;  ///< max residual of the fit relative to the t^{2s} term
  std::size_t flagged = 0;     ///< nodes whose misfit exceeds the threshold

  /// Piecewise-linear interpolant in x (N = 1).
  BoundaryFunction to_function() const {
    auto xs = x;
    auto vs = value;
    return BoundaryFunction::growing(
        [xs, vs](const Point& p) {
          if (p[0] <= xs.front()[0]) return vs.front();
          if (p[0] >= xs.back()[0]) return vs.back();
          std::size_t i = 0;
          while (xs[i + 1][0] < p[0]) ++i;
          const double w = (p[0] - xs[i][0]) / (xs[i + 1][0] - xs[i][0]);
          return (1 - w) * vs[i] + w * vs[i + 1];
        },
        0.0);
  }
};

/// Per x node, least-squares fit W = a + b t^{2s} + c t^2 over the first
/// `levels` t-levels; returns -2s b.
inline NeumannTrace neumann_trace(const ExtensionField& W, std::size_t levels = 6, double misfit_threshold = 0.05) {
  const auto& g = *W.grid();
  if (g.nt() < std::max<std::size_t>(levels, 4)) throw std::invalid_argument("need at least 4 t-levels");
  const double s = g.order().s();
  const std::size_t L = std::min(levels, g.nt());
  Eigen::MatrixXd A(L, 3);
  for (std::size_t j = 0; j < L; ++j) {
    const double t = g.t_nodes()[j];
    A(j, 0) = 1.0;
    A(j, 1) = std::pow(t, 2 * s);
    A(j, 2) = t * t;
  }
  // columns scaled for conditioning
  Eigen::Vector3d scale = A.colwise().norm().transpose();
  Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
  auto qr = As.colPivHouseholderQr();
  NeumannTrace out;
  out.x = g.x_nodes();
  out.value.resize(g.nx());
  out.misfit.resize(g.nx());
  for (std::size_t i = 0; i < g.nx(); ++i) {
    Eigen::VectorXd w(L);
    for (std::size_t j = 0; j < L; ++j) w(j) = W[g.index(j, i)];
    Eigen::Vector3d c = qr.solve(w).cwiseQuotient(scale);
    out.value[i] = -2 * s * c(1);
    const Eigen::VectorXd res = A * c - w;
    const double bscale = std::abs(c(1)) * A(L - 1, 1) + 1e-14 * (std::abs(c(0)) + 1e-300);
    out.misfit[i] = res.cwiseAbs().maxCoeff() / bscale;
    if (out.misfit[i] > misfit_threshold) ++out.flagged;
  }
  return out;
}

/// -(K W)_k / control volume at interior nodes (t > 0, off the lateral and
/// top faces): the conservative discrete div(t^{1-2s} ∇W). Other nodes are 0.
inline ExtensionField residual_Ms(const ExtensionField& W) {
  const auto& g = *W.grid();
  const auto K = detail::stiffness(g);
  const detail::Axes a = detail::solver_axes(g);
  Eigen::Map<const Eigen::VectorXd> w(W.values().data(), W.size());
  const Eigen::VectorXd kw = K * w;
  ExtensionField r(W.grid());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const std::size_t j = k / g.nx(), i = k % g.nx();
    if (j == 0 || j + 1 == g.nt() || detail::on_lateral(a, i)) continue;
    r[k] = -kw(k) / g.volume(k);
  }
  return r;
}

/// Interior mask matching residual_Ms.
inline std::vector<bool> interior_nodes(const WeightedGrid& g) {
  const detail::Axes a = detail::solver_axes(g);
  std::vector<bool> m(g.size(), false);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const std::size_t j = k / g.nx(), i = k % g.nx();
    m[k] = j > 0 && j + 1 < g.nt() && !detail::on_lateral(a, i);
  }
  return m;
}

/// Even reflection W(|t|, x) on the mirrored t-nodes -t_M..t_M.
struct ReflectedField {
  std::vector<double> t;  ///< 2M+1 nodes, increasing
  std::vector<Point> x;
  std::vector<double> values;  ///< row-major (t, x)
  std::vector<double> trace_residual;  ///< |t|^{1-2s}-divergence residual on the t = 0 row

  double at(std::size_t jj, std::size_t i) const { return values[jj * x.size() + i]; }
};

inline ReflectedField reflect_even(const ExtensionField& W) {
  const auto& g = *W.grid();
  const std::size_t M = g.nt() - 1, nx = g.nx();
  ReflectedField R;
  R.x = g.x_nodes();
  for (std::size_t jj = 0; jj <= 2 * M; ++jj) {
    const std::size_t j = jj >= M ? jj - M : M - jj;
    R.t.push_back(jj >= M ? g.t_nodes()[j] : -g.t_nodes()[j]);
    for (std::size_t i = 0; i < nx; ++i) R.values.push_back(W[g.index(j, i)]);
  }
  if (g.layout() == XLayout::cartesian) {
    // both halves contribute the same half-row of K W; the two-sided control
    // volume is twice the one-sided one
    const auto K = detail::stiffness(g);
    Eigen::Map<const Eigen::VectorXd> w(W.values().data(), W.size());
    const Eigen::VectorXd kw = K * w;
    const detail::Axes a = detail::solver_axes(g);
    R.trace_residual.assign(nx, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
      if (detail::on_lateral(a, i)) continue;
      R.trace_residual[i] = -2.0 * kw(i) / (2.0 * g.volume(i));
    }
  }
  return R;
}

/// k_s from the ratio between the Neumann trace of the Poisson extension and
/// the singular-integral value, for a Gaussian and a Lorentzian.
inline KsCalibration calibrate_ks(const FracOrder& order_in) {
  const FracOrder order(order_in.s(), 1);
  const std::vector<double> xs = {0.0, 0.2, 0.4};
  // a thin t-window keeps the t^{2+2s} term out of the fit
  auto t = graded_nodes(5e-4, 12, 2.0);
  std::vector<double> xv(xs.begin(), xs.end());
  auto grid = std::make_shared<WeightedGrid>(WeightedGrid::cartesian(order, t, xv));
  KsCalibration cal;
  for (const auto& u : {gaussian(1.0), lorentzian()}) {
    const auto U = extend_function(u, grid, order, 1e-13);
    const auto nt = neumann_trace(U, 8);
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) acc += nt.value[i] / frac_laplacian_pv(u, {xs[i], 0.0}, order, 0.5);
    cal.per_function.push_back(acc / xs.size());
  }
  double mean = 0.0;
  for (double v : cal.per_function) mean += v;
  mean /= cal.per_function.size();
  cal.ks = mean;
  for (double v : cal.per_function) cal.spread = std::max(cal.spread, std::abs(v - mean) / std::abs(mean));
  cal.stable = cal.spread <= 0.01 && mean > 0;
  return cal;
}

inline KernelConstants kernel_constants(const FracOrder& order) {
  return {frac_normalization(order), calibrate_ks(order).ks, poisson_normalization(order)};
}

/// Galerkin solve of the weak form ∫ t^{1-2s} ∇W·∇Ψ = k_s ∫_Ω f tr Ψ on the
/// grid. Dirichlet rows (complement trace, lateral and top faces) are exact.
inline ExtensionField solve_mixed(const MixedProblem& pb, GridPtr grid, SolveInfo* info = nullptr) {
  const auto& g = *grid;
  if (g.layout() != XLayout::cartesian) throw std::invalid_argument("solver needs a Cartesian grid");
  const FracOrder& order = pb.order;
  const double ks = pb.ks ? *pb.ks : calibrate_ks(order).ks;
  const detail::Axes a = detail::solver_axes(g);
  const std::size_t n = g.size(), nx = g.nx(), M = g.nt() - 1;

  std::vector<char> dirichlet(n, 0);
  std::vector<double> value(n, 0.0);
  std::vector<double> load(n, 0.0);
  std::vector<std::size_t> lateral_nodes;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = k / nx, i = k % nx;
    if (j == M || detail::on_lateral(a, i)) {
      dirichlet[k] = 1;
      lateral_nodes.push_back(k);
    } else if (j == 0) {
      const bool neumann = !pb.geometry || pb.geometry->contains(g.x(i));
      if (neumann) {
        load[k] = pb.f ? ks * pb.f(g.x(i)) * detail::trace_mass(a, i) : 0.0;
      } else {
        dirichlet[k] = 1;
      }
    }
  }
  if (pb.lateral == LateralData::poisson_extension) {
    if (!pb.lateral_trace) throw std::invalid_argument("poisson_extension lateral data needs a trace");
    parallel_for(lateral_nodes.size(), [&](std::size_t q) {
      const std::size_t k = lateral_nodes[q];
      value[k] = extension_value(pb.lateral_trace, g.t(k), g.x(k), order);
    });
  }

  std::vector<std::ptrdiff_t> slot(n, -1);
  std::size_t nf = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (!dirichlet[k]) slot[k] = nf++;
  const auto K = detail::stiffness(g);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
  for (std::size_t k = 0; k < n; ++k)
    if (slot[k] >= 0) rhs(slot[k]) = load[k];
  for (int col = 0; col < K.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
      const auto r = slot[it.row()], c = slot[it.col()];
      if (r < 0) continue;
      if (c >= 0) trip.emplace_back(r, c, it.value());
      else rhs(r) -= it.value() * value[it.col()];
    }
  Eigen::SparseMatrix<double> A(nf, nf);
  A.setFromTriplets(trip.begin(), trip.end());

  Eigen::VectorXd sol;
  SolveInfo si;
  si.ks = ks;
  if (order.dim() == 1) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw SolverError("factorisation failed", INFINITY);
    sol = ldlt.solve(rhs);
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>>
        cg;
    cg.setTolerance(1e-11);
    cg.setMaxIterations(20000);
    cg.compute(A);
    sol = cg.solve(rhs);
    si.iterations = int(cg.iterations());
  }
  const double bnorm = std::max(rhs.norm(), 1e-300);
  si.relative_residual = (A * sol - rhs).norm() / bnorm;
  if (!(si.relative_residual <= 1e-10) && rhs.norm() > 0) {
    throw SolverError("linear solve did not reach tolerance", si.relative_residual);
  }
  std::vector<double> W(value);
  for (std::size_t k = 0; k < n; ++k)
    if (slot[k] >= 0) W[k] = sol(slot[k]);

  // truncation proxy: field next to the artificial faces relative to its sup
  if (pb.lateral == LateralData::zero) {
    double edge = 0.0, sup = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      sup = std::max(sup, std::abs(W[k]));
      const std::size_t j = k / nx, i = k % nx;
      const bool near = j + 1 == M || (a.x.size() > 2 && ((i % a.x.size()) == 1 || (i % a.x.size()) + 2 == a.x.size()));
      if (near && !dirichlet[k]) edge = std::max(edge, std::abs(W[k]));
    }
    si.truncation_estimate = sup > 0 ? edge / sup : 0.0;
    if (si.truncation_estimate > pb.truncation_tolerance) {
      throw SolverError("box too small: truncation estimate above tolerance", si.truncation_estimate);
    }
  }
  if (info) *info = si;
  return {std::move(grid), std::move(W)};
}

/// Discrete energy W^T K W (equals weighted_h1_energy for Cartesian grids).
inline double discrete_energy(const ExtensionField& W) {
  const auto K = detail::stiffness(*W.grid());
  Eigen::Map<const Eigen::VectorXd> w(W.values().data(), W.size());
  return w.dot(K * w);
}

/// k_s Σ f W m over the Neumann trace nodes (right-hand side of the energy identity).
inline double neumann_work(const MixedProblem& pb, const ExtensionField& W, double ks) {
  const auto& g = *W.grid();
  const detail::Axes a = detail::solver_axes(g);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    if (detail::on_lateral(a, i)) continue;
    if (pb.geometry && !pb.geometry->contains(g.x(i))) continue;
    acc += ks * pb.f(g.x(i)) * W[i] * detail::trace_mass(a, i);
  }
  return acc;
}

}  // namespace csxlab
