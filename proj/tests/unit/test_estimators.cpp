#include <gtest/gtest.h>

#include <cmath>

#include "csxlab/estimators.hpp"

using namespace csxlab;

TEST(TaylorGap, ExactMembershipIsFlagged) {
  const FracOrder o(0.5, 2);
  const Point x0{1, 0}, nu{-1, 0};
  auto W = analytic_sampler([&](double t, const Point& x) { return 1.3 * barrier_halfspace(t, x, x0, nu, o); });
  auto rep = taylor_gap(W, x0, nu, 1.3, {0.4, 0.2, 0.1, 0.05}, o, 8);
  EXPECT_TRUE(rep.exact);
}

TEST(TaylorGap, ConstructedProfileGivesExponentTwoS) {
  for (double s : {0.25, 0.5, 0.75}) {
    const FracOrder o(s);
    const Point x0{0, 0}, nu{1, 0};
    auto W = analytic_sampler([&](double t, const Point& x) {
      return 0.7 * barrier_halfspace(t, x, x0, nu, o) + std::pow(t * t + x[0] * x[0], s);
    });
    auto rep = taylor_gap(W, x0, nu, 0.7, {0.4, 0.2, 0.1, 0.05, 0.025}, o, 10);
    EXPECT_NEAR(rep.fitted_exponent, 2 * s, 1e-9);
  }
}

TEST(BarrierGapSuite, HalfSpaceGapsVanish) {
  const FracOrder o(0.5, 2);
  auto geom = DomainGeometry::half_space({0, 0}, {1, 0}, 2);
  const std::vector<double> radii{0.2, 0.1, 0.05, 0.025};
  auto suite = barrier_gap_suite(geom, xbar_schedule({{0, 0}, {1, 0}}, radii), o, 0.05, 8);
  EXPECT_TRUE(suite.sup_halfspace.exact);
  EXPECT_TRUE(suite.semi_halfspace.exact);
  for (std::size_t k = 0; k < radii.size(); ++k) EXPECT_NEAR(suite.sup_halfspace.radii[k], radii[k], 1e-15);
  // 1/H_+ is homogeneous of degree -s: its C^{alpha} seminorm scales like r^{-s-alpha}
  EXPECT_NEAR(suite.semi_inverse_halfspace.fitted_exponent, -o.s() - suite.alpha, 1e-9);
}

TEST(BarrierGapSuite, DiskHalfSpaceGapDecaysFasterThanTwoS) {
  const FracOrder o(0.5, 2);
  auto geom = DomainGeometry::disk({0, 0}, 1);
  auto suite = barrier_gap_suite(geom, xbar_schedule({{0, 1}, {0, -1}}, {0.2, 0.1, 0.05, 0.025}), o, 0.05, 8);
  EXPECT_GE(suite.sup_halfspace.fitted_exponent, 1.4);
  EXPECT_LE(suite.semi_inverse_halfspace.fitted_exponent, -2 * o.s() + 0.05 + 0.1);
  EXPECT_THROW(barrier_gap_suite(geom, {{0, 0}, {0, 0.1}, {0, 0.2}, {0, 0.3}}, o, 0.05, 8), GeometryError);
}

TEST(RatioField, BarrierOverItselfIsOne) {
  const FracOrder o(0.5, 2);
  auto geom = DomainGeometry::disk({0, 0}, 1);
  auto g = graded_grid(DiskSlab{1.0, {0, 0}, 1.0}, o, 8);
  auto W = barrier_domain_field(geom, g, o);
  RatioOptions opt;
  opt.alpha = 0.45;
  opt.interface_value = [](const Point&) { return 1.0; };
  auto rf = ratio_field(W, geom, Denominator::barrier_domain, opt);
  for (std::size_t k = 0; k < W.size(); ++k)
    if (rf.included[k]) EXPECT_NEAR(rf.psi[k], 1.0, 1e-14);
  EXPECT_NEAR(rf.holder.seminorm, 0.0, 1e-13);
  EXPECT_GT(rf.interface, 0u);
  EXPECT_EQ(rf.excluded, 0u);
}

TEST(RatioField, BarrierOverDistanceBetweenComparabilityConstants) {
  for (double s : {0.25, 0.75}) {
    const FracOrder o(s, 1);
    auto geom = DomainGeometry::interval(-1, 1);
    auto g = graded_grid(Slab{1.0, {-1, 0}, {1, 0}, {-1, 1}, {}}, o, 12);
    auto W = barrier_domain_field(geom, g, o);
    RatioOptions opt;
    opt.alpha = 0.9 * s;
    auto rf = ratio_field(W, geom, Denominator::d_pow_s, opt);
    for (std::size_t k = 0; k < W.size(); ++k) {
      if (!rf.included[k]) continue;
      EXPECT_GE(rf.psi[k], std::pow(2.0, -s) - 1e-12);
      EXPECT_LE(rf.psi[k], 1.0 + 1e-12);
    }
    // without an interface value the two corner nodes are excluded
    EXPECT_EQ(rf.excluded, 2u);
  }
}
