#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "csxlab/order.hpp"
#include "csxlab/parallel.hpp"
#include "csxlab/weighted_grid.hpp"

namespace csxlab {

/// Log-log fit e(r) ≈ C r^p.
struct RateReport {
  std::vector<double> radii;
  std::vector<double> errors;
  double fitted_exponent = 0.0;
  double fit_residual = 0.0;  ///< max |log e - log(C r^p)| over fitted points
  double constant = 0.0;
  std::size_t excluded = 0;  ///< zero, negative or non-finite errors left out
  bool exact = false;        ///< every error vanished to rounding; exponent is +inf
};

inline RateReport fit_rate(std::vector<double> radii, std::vector<double> errors) {
  if (radii.size() != errors.size()) throw std::invalid_argument("radii and errors differ in length");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1])) throw std::invalid_argument("radii must be strictly decreasing");
  RateReport rep;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0)) throw std::invalid_argument("radii must be positive");
    if (errors[i] > 0 && std::isfinite(errors[i])) {
      lx.push_back(std::log(radii[i]));
      ly.push_back(std::log(errors[i]));
    } else {
      ++rep.excluded;
    }
  }
  rep.radii = std::move(radii);
  rep.errors = std::move(errors);
  if (lx.size() < 4) throw std::invalid_argument("rate fit needs at least 4 positive errors");
  const double n = double(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  rep.fitted_exponent = sxy / sxx;
  const double icpt = my - rep.fitted_exponent * mx;
  rep.constant = std::exp(icpt);
  for (std::size_t i = 0; i < lx.size(); ++i)
    rep.fit_residual = std::max(rep.fit_residual, std::abs(ly[i] - icpt - rep.fitted_exponent * lx[i]));
  return rep;
}

/// Sup over pairs of |F(z1) - F(z2)| / |z1 - z2|^alpha.
struct HolderReport {
  double alpha = 0.0;
  double seminorm = 0.0;
  ZPoint z1{}, z2{};
  std::size_t points = 0;
  std::size_t pairs = 0;  ///< pairs actually evaluated
  bool sampled = false;   ///< pair sampling instead of the exact scan
};

struct HolderOptions {
  std::size_t exact_limit = 5000;  ///< exact O(n^2) scan up to this many points
  std::size_t partners = 64;       ///< random partners per point when sampling
  std::uint64_t seed = 20240601;
  double min_separation = 0.0;     ///< pairs closer than this are skipped
};

namespace detail {

struct PairBest {
  double q = -1.0;
  std::size_t i = 0, j = 0;
};

// Deterministic reduction: the largest quotient wins, ties go to the lower index pair.
inline PairBest reduce_best(const std::vector<PairBest>& parts) {
  PairBest best;
  for (const auto& p : parts)
    if (p.q > best.q) best = p;
  return best;
}

inline HolderReport finish(const PairBest& b, const std::vector<ZPoint>& pts, double alpha, std::size_t pairs,
                           bool sampled) {
  HolderReport rep;
  rep.alpha = alpha;
  rep.points = pts.size();
  rep.pairs = pairs;
  rep.sampled = sampled;
  if (b.q >= 0) {
    rep.seminorm = b.q;
    rep.z1 = pts[b.i];
    rep.z2 = pts[b.j];
  }
  return rep;
}

}  // namespace detail

/// Generic point-set version: exact scan below exact_limit points, else each
/// point meets `partners` partners drawn from a fixed-seed generator.
inline HolderReport holder_seminorm(const std::vector<double>& F, const std::vector<ZPoint>& pts, double alpha,
                                    const HolderOptions& opt = {}) {
  if (F.size() != pts.size()) throw std::invalid_argument("values and points differ in length");
  if (pts.size() < 2) throw std::invalid_argument("need at least two points");
  const std::size_t n = pts.size();
  const bool sampled = n > opt.exact_limit;
  std::vector<detail::PairBest> best(n);
  std::vector<std::size_t> count(n, 0);
  parallel_for(n, [&](std::size_t i) {
    auto visit = [&](std::size_t j) {
      const double d = distance(pts[i], pts[j]);
      if (!(d > 0) || d < opt.min_separation) return;
      ++count[i];
      const double q = std::abs(F[i] - F[j]) / std::pow(d, alpha);
      if (q > best[i].q) best[i] = {q, std::min(i, j), std::max(i, j)};
    };
    if (!sampled) {
      for (std::size_t j = i + 1; j < n; ++j) visit(j);
    } else {
      std::mt19937_64 rng(opt.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (std::size_t m = 0; m < opt.partners; ++m) visit(pick(rng));
    }
  });
  std::size_t pairs = 0;
  for (auto c : count) pairs += c;
  return detail::finish(detail::reduce_best(best), pts, alpha, pairs, sampled);
}

/// Grid-aware version over the nodes selected by `mask` (all nodes when empty).
/// Pairs closer than two local cells are skipped. Above exact_limit nodes the
/// scan is stratified: every pair within an index window of 4 cells plus
/// `partners` random partners per node.
inline HolderReport holder_seminorm(const ExtensionField& F, double alpha, const std::vector<bool>& mask = {},
                                    const HolderOptions& opt = {}) {
  const auto& g = *F.grid();
  const bool polar = g.layout() == XLayout::polar;
  const auto& t = g.t_nodes();
  const auto& ax = g.axis_x();
  const std::size_t nt = g.nt(), nx = g.nx();
  const std::size_t n1 = ax.size(), n2 = polar ? std::size_t(g.n_phi()) : g.axis_y().size();
  auto gap = [](const std::vector<double>& a, std::size_t i) {
    double h = 0.0;
    if (i > 0) h = std::max(h, a[i] - a[i - 1]);
    if (i + 1 < a.size()) h = std::max(h, a[i + 1] - a[i]);
    return h;
  };
  // local cell size per node
  std::vector<double> hx(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    const std::size_t i1 = i % n1, i2 = i / n1;
    if (polar) {
      const std::size_t ir = i / n2;
      const double dphi = 2 * std::numbers::pi / n2;
      hx[i] = std::max(gap(ax, ir), ax[ir] * dphi);
    } else {
      hx[i] = std::max(gap(ax, i1), g.axis_y().size() > 1 ? gap(g.axis_y(), i2) : 0.0);
    }
  }
  std::vector<std::size_t> ids;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (mask.empty() || mask[k]) ids.push_back(k);
  if (ids.size() < 2) throw std::invalid_argument("need at least two points");
  std::vector<ZPoint> pts(ids.size());
  std::vector<double> vals(ids.size()), h(ids.size());
  std::vector<std::ptrdiff_t> slot(g.size(), -1);
  for (std::size_t m = 0; m < ids.size(); ++m) {
    const std::size_t k = ids[m];
    pts[m] = g.point(k);
    vals[m] = F[k];
    h[m] = std::max(gap(t, k / nx), hx[k % nx]);
    slot[k] = std::ptrdiff_t(m);
  }
  const std::size_t n = ids.size();
  const bool sampled = n > opt.exact_limit;
  std::vector<detail::PairBest> best(n);
  std::vector<std::size_t> count(n, 0);
  parallel_for(n, [&](std::size_t a) {
    auto visit = [&](std::size_t b) {
      if (a == b) return;
      const double d = distance(pts[a], pts[b]);
      if (!(d > 0) || d < 2.0 * std::max(h[a], h[b]) || d < opt.min_separation) return;
      ++count[a];
      const double q = std::abs(vals[a] - vals[b]) / std::pow(d, alpha);
      if (q > best[a].q) best[a] = {q, std::min(a, b), std::max(a, b)};
    };
    if (!sampled) {
      for (std::size_t b = a + 1; b < n; ++b) visit(b);
      return;
    }
    const std::size_t k = ids[a], j = k / nx, i = k % nx;
    const long W = 4;
    const long i1 = long(polar ? i / n2 : i % n1), i2 = long(polar ? i % n2 : i / n1);
    const long m1 = long(n1), m2 = long(n2);
    for (long dj = -W; dj <= W; ++dj)
      for (long d1 = -W; d1 <= W; ++d1)
        for (long d2 = -W; d2 <= W; ++d2) {
          const long jj = long(j) + dj, a1 = i1 + d1;
          long a2 = i2 + d2;
          if (jj < 0 || jj >= long(nt) || a1 < 0 || a1 >= m1) continue;
          if (polar) a2 = ((a2 % m2) + m2) % m2;
          else if (a2 < 0 || a2 >= m2) continue;
          const std::size_t ii = polar ? std::size_t(a1 * m2 + a2) : std::size_t(a2 * m1 + a1);
          const auto s = slot[std::size_t(jj) * nx + ii];
          if (s > std::ptrdiff_t(a)) visit(std::size_t(s));
        }
    std::mt19937_64 rng(opt.seed ^ (0x9e3779b97f4a7c15ULL * (a + 1)));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t m = 0; m < opt.partners; ++m) visit(pick(rng));
  });
  std::size_t pairs = 0;
  for (auto c : count) pairs += c;
  return detail::finish(detail::reduce_best(best), pts, alpha, pairs, sampled);
}

}  // namespace csxlab
