#pragma once

// End-to-end runs shared by the command-line driver and the acceptance suite.
// They return measurements only; pass/fail thresholds live with the callers.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "csxlab/barrier.hpp"
#include "csxlab/estimators.hpp"
#include "csxlab/kernels.hpp"
#include "csxlab/projection.hpp"
#include "csxlab/solver.hpp"

namespace csxlab::scenarios {

inline double default_eps(const FracOrder& order) { return 0.1 * order.s(); }

/// Least-squares slope of log e against log(1/h) with h = 1/M.
inline double refinement_order(const std::vector<int>& M, const std::vector<double>& err) {
  const std::size_t n = M.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += std::log(double(M[i])), my += std::log(err[i]);
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(double(M[i])) - mx;
    sxy += dx * (std::log(err[i]) - my);
    sxx += dx * dx;
  }
  return -sxy / sxx;
}

// ---- barrier ----------------------------------------------------------------

struct BarrierCheck {
  double trace_error = 0.0;         ///< max |h(0, delta) - max(delta, 0)^s|, both routes
  double homogeneity_error = 0.0;   ///< max |h(λt, λδ) - λ^s h(t, δ)| / (λ^s |h|)
  double polar_constant = 1.0;
  double cross_route_gap = 0.0;     ///< sup |integral - c polar| after the fit
  std::vector<double> deltas, trace_values;
};

inline BarrierCheck barrier_check(const FracOrder& order, int trace_points = 401, int homog_points = 20,
                                  int ref_points = 50) {
  BarrierCheck out;
  const double s = order.s();
  for (int i = 0; i < trace_points; ++i) {
    const double d = -2.0 + 4.0 * i / (trace_points - 1);
    const double expect = std::pow(std::max(d, 0.0), s);
    const double h = barrier_integral(0.0, d, order);
    out.deltas.push_back(d);
    out.trace_values.push_back(h);
    out.trace_error = std::max({out.trace_error, std::abs(h - expect),
                                std::abs(barrier_polar(0.0, d, order) - expect)});
  }
  for (int i = 0; i < homog_points; ++i)
    for (int j = 0; j < homog_points; ++j) {
      const double t = 2.0 * (i + 1) / homog_points;
      const double d = -2.0 + 4.0 * j / (homog_points - 1);
      const double h = barrier_integral(t, d, order);
      for (double lam : {2.0, 10.0}) {
        const double hl = barrier_integral(lam * t, lam * d, order);
        const double scale = std::pow(lam, s) * std::abs(h);
        out.homogeneity_error = std::max(out.homogeneity_error, std::abs(hl - std::pow(lam, s) * h) / scale);
      }
    }
  std::vector<double> ts, ds;
  for (int i = 0; i < ref_points; ++i) {
    ts.push_back(2.0 * (i + 1) / ref_points);
    ds.push_back(-2.0 + 4.0 * i / (ref_points - 1));
  }
  out.polar_constant = fit_polar_constant(order, ts, ds);
  for (double t : ts)
    for (double d : ds)
      out.cross_route_gap = std::max(
          out.cross_route_gap, std::abs(barrier_integral(t, d, order) - out.polar_constant * barrier_polar(t, d, order)));
  return out;
}

// ---- kernels ----------------------------------------------------------------

struct ExtendCheck {
  std::vector<double> t;
  std::vector<double> mass;        ///< ∫ P(t, y) dy, exp-sinh on the half-line
  std::size_t nodes = 0;
  std::size_t violations = 0;      ///< nodes outside [inf u, sup u]
};

inline double poisson_mass(double t, const FracOrder& order) {
  boost::math::quadrature::exp_sinh<double> rule;
  if (order.dim() == 1) return 2 * rule.integrate([&](double y) { return poisson_kernel(t, {y, 0}, order); }, 1e-15);
  return 2 * std::numbers::pi * rule.integrate([&](double r) { return r * poisson_kernel(t, {r, 0}, order); }, 1e-15);
}

inline ExtendCheck extend_check(const FracOrder& order, int resolution = 10, std::optional<double> grading = {}) {
  ExtendCheck out;
  for (double t : {0.1, 1.0, 10.0}) {
    out.t.push_back(t);
    out.mass.push_back(poisson_mass(t, order));
  }
  GridPtr g = order.dim() == 1 ? graded_grid(Slab{1.0, {-1.5, 0}, {1.5, 0}, {-1, 1}, {}}, order, resolution, grading)
                               : graded_grid(DiskSlab{1.0, {0, 0}, 1.2}, order, resolution, grading);
  for (const auto& [u, lo, hi] : {std::tuple{ball_solution(order), 0.0, ball_solution_constant(order)},
                                  std::tuple{gaussian(0.5), 0.0, 1.0}}) {
    const auto W = extend_function(u, g, order, 1e-8);
    for (std::size_t k = 0; k < W.size(); ++k) {
      ++out.nodes;
      if (W[k] < lo - 1e-10 || W[k] > hi + 1e-10) ++out.violations;
    }
  }
  return out;
}

// ---- A2 ---------------------------------------------------------------------

struct A2Row {
  double radius, center_t, product;
};

/// Balls centred at t = c r for each ratio c, over the given radii.
inline std::vector<A2Row> a2_table(const FracOrder& order, const std::vector<double>& radii,
                                   const std::vector<double>& center_ratios = {0.0, 0.5, 2.0}) {
  std::vector<A2Row> rows;
  for (double c : center_ratios)
    for (double r : radii) rows.push_back({r, c * r, a2_product({c * r, {0, 0}, r}, order)});
  return rows;
}

// ---- solver -----------------------------------------------------------------

/// Neumann-only problem whose exact solution is the extension of V = gaussian(0.5):
/// f = (-Δ)^s V, lateral and top data from the kernel route.
inline MixedProblem neumann_only_problem(const FracOrder& order, double ks) {
  auto V = gaussian(0.5);
  MixedProblem pb;
  pb.f = BoundaryFunction::growing([V, order](const Point& x) { return frac_laplacian_pv(V, x, order, 0.5); }, 0.0);
  pb.order = order;
  pb.box = Slab{3.0, {-4, 0}, {4, 0}, {}, {}};
  pb.lateral = LateralData::poisson_extension;
  pb.lateral_trace = V;
  pb.ks = ks;
  return pb;
}

struct CrossValidation {
  std::vector<int> M;
  std::vector<double> error;  ///< sup over B_{1/2}^+ of |solver - kernel route|
  std::vector<double> residual;
  double order = 0.0;
};

inline CrossValidation cross_validation(const FracOrder& order, double ks, const std::vector<int>& levels,
                                        std::optional<double> grading = {}) {
  CrossValidation out;
  const auto pb = neumann_only_problem(order, ks);
  for (int M : levels) {
    auto g = graded_grid(pb.box, order, M, grading);
    SolveInfo info;
    const auto W = solve_mixed(pb, g, &info);
    std::vector<std::size_t> ids;
    for (std::size_t k = 0; k < g->size(); ++k)
      if (g->t(k) <= 0.5 && std::abs(g->x(k)[0]) <= 0.5) ids.push_back(k);
    std::vector<double> e(ids.size());
    parallel_for(ids.size(), [&](std::size_t q) {
      const auto k = ids[q];
      e[q] = std::abs(W[k] - extension_value(pb.lateral_trace, g->t(k), g->x(k), order));
    });
    out.M.push_back(M);
    out.error.push_back(*std::max_element(e.begin(), e.end()));
    out.residual.push_back(info.relative_residual);
  }
  out.order = refinement_order(out.M, out.error);
  return out;
}

struct RegularityLevel {
  int M = 0;
  double seminorm = 0.0, sup_w = 0.0, sup_f = 0.0, constant = 0.0;
  HolderReport holder;
};

struct NeumannRegularity {
  double alpha = 0.0;
  std::vector<RegularityLevel> levels;
  double drift = 0.0;  ///< |C_finest / C_previous - 1|
};

/// Hölder exponent used for the Neumann-only regularity check; capped below 1.
inline double regularity_alpha(const FracOrder& order, double eps) {
  return std::min(2 * order.s() - eps, 1.0 - eps);
}

inline NeumannRegularity neumann_regularity(const FracOrder& order, double ks, const std::vector<int>& levels,
                                            double eps, std::optional<double> grading = {},
                                            const HolderOptions& hopt = {}) {
  NeumannRegularity out;
  out.alpha = regularity_alpha(order, eps);
  const auto pb = neumann_only_problem(order, ks);
  for (int M : levels) {
    auto g = graded_grid(pb.box, order, M, grading);
    const auto W = solve_mixed(pb, g);
    std::vector<bool> mask(g->size());
    RegularityLevel lv;
    lv.M = M;
    for (std::size_t k = 0; k < g->size(); ++k) {
      mask[k] = g->t(k) <= 1.0 + 1e-12 && std::abs(g->x(k)[0]) <= 1.0 + 1e-12;
      if (!mask[k]) continue;
      lv.sup_w = std::max(lv.sup_w, std::abs(W[k]));
      if (k < g->nx()) lv.sup_f = std::max(lv.sup_f, std::abs(pb.f(g->x(k))));
    }
    lv.holder = holder_seminorm(W, out.alpha, mask, hopt);
    lv.seminorm = lv.holder.seminorm;
    lv.constant = lv.seminorm / (lv.sup_w + lv.sup_f);
    out.levels.push_back(lv);
  }
  const auto n = out.levels.size();
  if (n >= 2) out.drift = std::abs(out.levels[n - 1].constant / out.levels[n - 2].constant - 1.0);
  return out;
}

// ---- ball problem: projection, Taylor rate, main theorem ---------------------

inline DomainGeometry ball_geometry(const FracOrder& order) {
  return order.dim() == 1 ? DomainGeometry::interval(-1, 1) : DomainGeometry::disk({0, 0}, 1);
}

/// Boundary points of the unit ball: ±1 for N = 1, `count` equally spaced points for N = 2.
inline std::vector<BoundaryPoint> ball_boundary_points(const FracOrder& order, int count = 3) {
  if (order.dim() == 1) return {{{1, 0}, {-1, 0}}, {{-1, 0}, {1, 0}}};
  std::vector<BoundaryPoint> out;
  for (int k = 0; k < count; ++k) {
    const double phi = 0.3 + 2 * std::numbers::pi * k / count;
    const Point e{std::cos(phi), std::sin(phi)};
    out.push_back({e, -1.0 * e});
  }
  return out;
}

struct ProjectionRates {
  BoundaryPoint point;
  ProjectionReport projection;
  RateReport taylor;
};

struct ProjectionConfig {
  double r0 = 0.4;
  int kmax = 5;
  double r_min = 0.05;
  int taylor_points = 7;  ///< radii r0 .. r_min, geometrically spaced
  int resolution = 12;
};

inline std::vector<double> taylor_radii(const ProjectionConfig& c) {
  std::vector<double> r;
  for (int k = 0; k < c.taylor_points; ++k)
    r.push_back(c.r0 * std::pow(c.r_min / c.r0, double(k) / (c.taylor_points - 1)));
  return r;
}

inline std::vector<ProjectionRates> projection_rates(const FracOrder& order, const FieldSampler& W,
                                                     const std::vector<BoundaryPoint>& points,
                                                     const ProjectionConfig& cfg) {
  std::vector<ProjectionRates> out;
  const auto radii = taylor_radii(cfg);
  for (const auto& b : points) {
    ProjectionRates pr;
    pr.point = b;
    pr.projection = projection_limit(W, b.x0, b.nu, cfg.r0, cfg.kmax, order, cfg.resolution);
    pr.taylor = taylor_gap(W, b.x0, b.nu, pr.projection.q_limit, radii, order, cfg.resolution);
    out.push_back(std::move(pr));
  }
  return out;
}

struct MainTheoremLevel {
  int M = 0;
  double sup_w = 0.0, sup_f = 1.0;
  RatioField psi;          ///< W / d^s
  RatioField barrier;      ///< H_Ω^+ / d^s
  double constant = 0.0;   ///< [Ψ] / (sup|W| + sup|f|)
};

struct MainTheorem {
  double alpha = 0.0;
  std::vector<MainTheoremLevel> levels;
  double drift = 0.0;          ///< of the Ψ constant between the last two levels
  double barrier_drift = 0.0;  ///< of the H_Ω^+/d^s seminorm
};

inline GridPtr ball_region_grid(const FracOrder& order, int M, std::optional<double> grading = {}) {
  if (order.dim() == 1) return graded_grid(Slab{1.0, {-1, 0}, {1, 0}, {-1.0, 1.0}, {}}, order, M, grading);
  return graded_grid(DiskSlab{1.0, {0, 0}, 1.0}, order, M, grading);
}

/// Ψ = W / d^s for the ball solution on [0, 1] x closure(B_1), interface values
/// from `q_at` (the projection limit at the boundary point).
inline MainTheorem main_theorem(const FracOrder& order, const FieldSampler& W, const std::vector<int>& levels,
                                double eps, std::function<double(const Point&)> q_at,
                                std::optional<double> grading = {}, const HolderOptions& hopt = {}) {
  MainTheorem out;
  out.alpha = order.s() - eps;
  const auto geom = ball_geometry(order);
  for (int M : levels) {
    MainTheoremLevel lv;
    lv.M = M;
    auto g = ball_region_grid(order, M, grading);
    const auto w = W(g);
    lv.sup_w = w.sup_norm();
    RatioOptions opt;
    opt.alpha = out.alpha;
    opt.interface_value = q_at;
    opt.holder = hopt;
    lv.psi = ratio_field(w, geom, Denominator::d_pow_s, opt);
    RatioOptions bopt = opt;
    bopt.interface_value = [](const Point&) { return 1.0; };
    lv.barrier = ratio_field(barrier_domain_field(geom, g, order), geom, Denominator::d_pow_s, bopt);
    lv.constant = lv.psi.holder.seminorm / (lv.sup_w + lv.sup_f);
    out.levels.push_back(std::move(lv));
  }
  const auto n = out.levels.size();
  if (n >= 2) {
    out.drift = std::abs(out.levels[n - 1].constant / out.levels[n - 2].constant - 1.0);
    out.barrier_drift =
        std::abs(out.levels[n - 1].barrier.holder.seminorm / out.levels[n - 2].barrier.holder.seminorm - 1.0);
  }
  return out;
}

}  // namespace csxlab::scenarios
