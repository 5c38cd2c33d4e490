// One PASS/FAIL line per criterion. `acceptance` runs all of them,
// `acceptance --criterion NAME` a single one. Exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "csxlab/csxlab.hpp"
#include "csxlab/scenarios.hpp"

using namespace csxlab;
namespace sc = csxlab::scenarios;

namespace {

// Tolerances, as stated by the criteria.
constexpr double kTraceTol = 1e-6;
constexpr double kHomogeneityTol = 1e-8;
constexpr double kCrossRouteTol = 1e-5;
constexpr double kMassTol = 1e-8;
constexpr double kA2Tol = 1e-6;
constexpr double kKsSpread = 0.01;
constexpr double kSolverOrder = 1.0;
constexpr double kDrift = 0.10;
constexpr double kSupSlack = 0.1;       // sup gaps: exponent >= 2s - 0.1
constexpr double kSemiSlack = 0.15;     // seminorms: exponent >= s - 0.15
constexpr double kInverseSlack = 0.1;   // inverse seminorms: exponent <= -2s + eps + 0.1
constexpr double kTaylorSlack = 0.15;   // Taylor gap: exponent >= 2s - eps - 0.15
constexpr double kProjectionTol = 1e-9;

const std::vector<double> kOrders{0.25, 0.5, 0.75};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok) { pass = pass && ok; }
};

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

// Literature value 2^{1-2s} Gamma(1-s)/Gamma(s), reported next to the calibration.
double ks_reference(double s) { return std::pow(2.0, 1 - 2 * s) * std::tgamma(1 - s) / std::tgamma(s); }

void barrier_trace(Outcome& o) {
  for (double s : kOrders) {
    const auto r = sc::barrier_check(FracOrder(s), 401, 2, 2);
    o.require(r.trace_error <= kTraceTol);
    o.detail << " s=" << s << ":" << fmt(r.trace_error);
  }
}

void barrier_homogeneity(Outcome& o) {
  for (double s : kOrders) {
    const auto r = sc::barrier_check(FracOrder(s), 2, 20, 2);
    o.require(r.homogeneity_error <= kHomogeneityTol);
    o.detail << " s=" << s << ":" << fmt(r.homogeneity_error);
  }
}

void barrier_cross_route(Outcome& o) {
  for (double s : kOrders) {
    const auto r = sc::barrier_check(FracOrder(s), 2, 2, 50);
    o.require(r.cross_route_gap <= kCrossRouteTol);
    o.detail << " s=" << s << ":gap=" << fmt(r.cross_route_gap) << ",c=" << fmt(r.polar_constant);
  }
}

void poisson_mass(Outcome& o) {
  for (int N : {1, 2})
    for (double s : kOrders) {
      const auto r = sc::extend_check(FracOrder(s, N), 8);
      double worst = 0;
      for (double m : r.mass) worst = std::max(worst, std::abs(m - 1));
      o.require(worst <= kMassTol && r.violations == 0);
      o.detail << " N" << N << ",s=" << s << ":" << fmt(worst) << "/" << r.violations << "of" << r.nodes;
    }
}

void a2_invariance(Outcome& o) {
  for (int N : {1, 2})
    for (double s : kOrders) {
      const FracOrder ord(s, N);
      const auto rows = sc::a2_table(ord, {0.1, 1.0, 10.0});
      double spread = 0;
      for (std::size_t i = 0; i < rows.size(); i += 3) {
        const double a = rows[i].product;
        for (std::size_t j = i; j < i + 3; ++j) spread = std::max(spread, std::abs(rows[j].product / a - 1));
      }
      o.require(spread <= kA2Tol);
      if (s == 0.5)
        for (const auto& r : rows) o.require(r.product == 1.0);
      o.detail << " N" << N << ",s=" << s << ":" << fmt(spread);
    }
}

void ks_stability(Outcome& o) {
  for (double s : kOrders) {
    const auto c = calibrate_ks(FracOrder(s));
    o.require(c.spread <= kKsSpread && c.ks > 0);
    o.detail << " s=" << s << ":ks=" << fmt(c.ks) << "(ref " << fmt(ks_reference(s)) << "),spread=" << fmt(c.spread);
  }
}

void solver_cross_validation(Outcome& o) {
  for (double s : kOrders) {
    const FracOrder ord(s);
    const auto cv = sc::cross_validation(ord, calibrate_ks(ord).ks, {16, 32, 64});
    bool decreasing = cv.error[1] < cv.error[0] && cv.error[2] < cv.error[1];
    o.require(decreasing && cv.order >= kSolverOrder);
    o.detail << " s=" << s << ":order=" << fmt(cv.order) << ",err=" << fmt(cv.error.back());
  }
}

void neumann_regularity(Outcome& o) {
  for (double s : kOrders) {
    const FracOrder ord(s);
    const auto nr = sc::neumann_regularity(ord, calibrate_ks(ord).ks, {16, 32, 64}, sc::default_eps(ord));
    o.require(nr.drift <= kDrift);
    o.detail << " s=" << s << ":alpha=" << fmt(nr.alpha) << ",C=" << fmt(nr.levels.back().constant)
             << ",drift=" << fmt(nr.drift);
  }
}

const char* const kGapNames[6] = {"sup|H+-HO|", "[H+-HO]", "[1/H+]", "sup|d^s-HO|", "[d^s-HO]", "[d^-s]"};

void lemma6_suite(Outcome& o) {
  const auto geom = DomainGeometry::disk({0, 0}, 1);
  const std::vector<double> radii{0.2, 0.1, 0.05, 0.025, 0.0125};
  for (double s : kOrders) {
    const FracOrder ord(s, 2);
    const double eps = sc::default_eps(ord);
    const auto xs = xbar_schedule({{1, 0}, {-1, 0}}, radii);
    const auto r = barrier_gap_suite(geom, xs, ord, eps, 12);
    const double e[6] = {r.sup_halfspace.fitted_exponent,  r.semi_halfspace.fitted_exponent,
                         r.semi_inverse_halfspace.fitted_exponent, r.sup_dist.fitted_exponent,
                         r.semi_dist.fitted_exponent,      r.semi_inverse_dist.fitted_exponent};
    const bool ok[6] = {e[0] >= 2 * s - kSupSlack, e[1] >= s - kSemiSlack, e[2] <= -2 * s + eps + kInverseSlack,
                        e[3] >= 2 * s - kSupSlack, e[4] >= s - kSemiSlack, e[5] <= -2 * s + eps + kInverseSlack};
    o.detail << " s=" << s << ":[";
    for (int i = 0; i < 6; ++i) {
      o.require(ok[i]);
      o.detail << (i ? "," : "") << kGapNames[i] << "=" << fmt(e[i]) << (ok[i] ? "" : "!");
    }
    o.detail << "]";
  }
}

void projection_algebra(Outcome& o) {
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> n;
  double worst_res = 0, worst_coef = 0;
  for (int N : {1, 2})
    for (double s : kOrders) {
      const FracOrder ord(s, N);
      const Point x0{0.2, N == 2 ? -0.1 : 0.0};
      const Point nu = N == 2 ? Point{0.8, -0.6} : Point{-1.0, 0.0};
      auto g = graded_grid(HalfBall{x0, 0.3, nu}, ord, 12);
      for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> v(g->size());
        for (auto& x : v) x = n(rng);
        ExtensionField W(g, v);
        worst_res = std::max(worst_res, std::abs(projection_residual(W, x0, nu, 0.3)) / projection_scale(W, x0, nu, 0.3));
        const double q = n(rng);
        auto H = barrier_halfspace_field(x0, nu, g, ord);
        worst_coef = std::max(worst_coef, std::abs(project_coefficient(q * H, x0, nu, 0.3) - q) / std::abs(q));
      }
    }
  o.require(worst_res <= kProjectionTol && worst_coef <= kProjectionTol);
  o.detail << " residual=" << fmt(worst_res) << " coefficient=" << fmt(worst_coef);
}

void taylor_rate(Outcome& o) {
  for (int N : {1, 2})
    for (double s : kOrders) {
      const FracOrder ord(s, N);
      const double eps = sc::default_eps(ord);
      sc::ProjectionConfig cfg;
      cfg.resolution = N == 1 ? 16 : 12;
      const auto W = extension_sampler(ball_solution(ord), ord, 1e-8);
      const auto rows = sc::projection_rates(ord, W, sc::ball_boundary_points(ord), cfg);
      // Q(x0) of the ball solution is c 2^s; shown for reference only
      const double q_ref = ball_solution_constant(ord) * std::pow(2.0, s);
      o.detail << " N" << N << ",s=" << s << ":[";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& p = rows[i].projection;
        const double e = rows[i].taylor.fitted_exponent;
        const bool ok = e >= 2 * s - eps - kTaylorSlack && std::isfinite(p.q_limit) && p.cauchy;
        o.require(ok);
        o.detail << (i ? "," : "") << fmt(e) << "/Q=" << fmt(p.q_limit) << (ok ? "" : "!");
      }
      o.detail << "] Qref=" << fmt(q_ref);
    }
}

void main_theorem(Outcome& o) {
  for (int N : {1, 2})
    for (double s : kOrders) {
      const FracOrder ord(s, N);
      const double eps = sc::default_eps(ord);
      const auto W = extension_sampler(ball_solution(ord), ord, 1e-8);
      // the ball solution is radial, so one boundary point fixes Q everywhere on the sphere
      const auto b = sc::ball_boundary_points(ord).front();
      const double q = projection_limit(W, b.x0, b.nu, 0.4, 5, ord, N == 1 ? 16 : 8).q_limit;
      const std::vector<int> levels = N == 1 ? std::vector<int>{16, 32} : std::vector<int>{8, 16};
      const auto mt = sc::main_theorem(ord, W, levels, eps, [q](const Point&) { return q; });
      const bool ok_psi = mt.drift <= kDrift, ok_bar = mt.barrier_drift <= kDrift;
      o.require(ok_psi && ok_bar);
      o.detail << " N" << N << ",s=" << s << ":C=" << fmt(mt.levels[0].constant) << "->" << fmt(mt.levels[1].constant)
               << (ok_psi ? "" : "!") << ",[H/d^s]=" << fmt(mt.levels[0].barrier.holder.seminorm) << "->"
               << fmt(mt.levels[1].barrier.holder.seminorm) << (ok_bar ? "" : "!");
    }
}

const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> kCriteria{
    {"barrier-trace", barrier_trace},
    {"barrier-homogeneity", barrier_homogeneity},
    {"barrier-cross-route", barrier_cross_route},
    {"poisson-mass", poisson_mass},
    {"a2-invariance", a2_invariance},
    {"ks-stability", ks_stability},
    {"solver-cross-validation", solver_cross_validation},
    {"neumann-regularity", neumann_regularity},
    {"lemma6-suite", lemma6_suite},
    {"projection-algebra", projection_algebra},
    {"taylor-rate", taylor_rate},
    {"main-theorem", main_theorem},
};

bool run(const std::string& name, const std::function<void(Outcome&)>& fn) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " error: " << e.what();
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s %s (%.1fs):%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), dt, o.detail.str().c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = argv[++i];
    } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
      set_thread_count(unsigned(std::stoul(argv[++i])));
    } else if (std::strcmp(argv[i], "--list") == 0) {
      for (const auto& [name, fn] : kCriteria) std::printf("%s\n", name.c_str());
      return 0;
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion NAME] [--threads N] [--list]\n");
      return 2;
    }
  }
  bool all = true, found = only.empty();
  for (const auto& [name, fn] : kCriteria) {
    if (!only.empty() && name != only) continue;
    found = true;
    all = run(name, fn) && all;
  }
  if (!found) {
    std::fprintf(stderr, "unknown criterion: %s\n", only.c_str());
    return 2;
  }
  return all ? 0 : 1;
}
