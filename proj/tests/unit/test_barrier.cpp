#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "csxlab/barrier.hpp"

using namespace csxlab;

class BarrierOrders : public ::testing::TestWithParam<double> {};

TEST_P(BarrierOrders, TraceIsPositivePartPower) {
  const FracOrder o(GetParam());
  for (double d = -2.0; d <= 2.0; d += 0.05) {
    const double expect = std::pow(std::max(d, 0.0), o.s());
    EXPECT_NEAR(barrier_integral(0.0, d, o), expect, 1e-9);
    if (std::abs(d) >= 0.1) EXPECT_NEAR(barrier_integral(1e-10, d, o), expect, 1e-4);
  }
}

TEST_P(BarrierOrders, IntegralRouteMatchesClosedForm) {
  const FracOrder o(GetParam());
  for (double t : {0.01, 0.3, 1.0, 4.0})
    for (double d : {-3.0, -0.5, 0.0, 0.2, 2.0}) {
      const double ref = std::pow(std::hypot(t, d), o.s()) * std::pow(std::cos(0.5 * std::atan2(t, d)), 2 * o.s());
      EXPECT_NEAR(barrier_integral(t, d, o), ref, 1e-9 * std::max(ref, 1e-3));
      EXPECT_NEAR(barrier_polar(t, d, o), ref, 1e-13 * std::max(ref, 1e-3));
    }
}

TEST_P(BarrierOrders, Homogeneity) {
  const FracOrder o(GetParam());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(0.0, 2.0), ud(-2.0, 2.0);
  for (int k = 0; k < 50; ++k) {
    const double t = ut(rng), d = ud(rng);
    for (double lam : {0.5, 2.0, 10.0}) {
      const double h = barrier_polar(t, d, o);
      EXPECT_NEAR(barrier_polar(lam * t, lam * d, o), std::pow(lam, o.s()) * h, 1e-12 * std::pow(lam, o.s()) * h);
    }
  }
}

TEST_P(BarrierOrders, GradientMatchesFiniteDifference) {
  const FracOrder o(GetParam());
  const double t = 0.4, d = -0.3, h = 1e-6;
  const auto g = barrier_gradient(t, d, o);
  EXPECT_NEAR(g[0], (barrier_polar(t + h, d, o) - barrier_polar(t - h, d, o)) / (2 * h), 1e-6);
  EXPECT_NEAR(g[1], (barrier_polar(t, d + h, o) - barrier_polar(t, d - h, o)) / (2 * h), 1e-6);
}

TEST_P(BarrierOrders, PolarConstantFitIsOne) {
  const FracOrder o(GetParam());
  EXPECT_NEAR(fit_polar_constant(o, {0.1, 0.5, 1.5}, {-1.0, 0.0, 0.7}), 1.0, 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Orders, BarrierOrders, ::testing::Values(0.25, 0.5, 0.75));

TEST(Barrier, DomainBarrierOnHalfSpaceEqualsHalfSpaceBarrier) {
  const FracOrder o(0.4, 2);
  const Point x0{0.1, 0.2}, nu{0.6, 0.8};
  auto geom = DomainGeometry::half_space(x0, nu, 2);
  for (double t : {0.0, 0.3})
    for (double x : {-1.0, 0.0, 0.5})
      for (double y : {-0.4, 0.9})
        EXPECT_NEAR(barrier_domain(t, {x, y}, geom, o), barrier_halfspace(t, {x, y}, x0, nu, o), 1e-14);
}

TEST(Barrier, RejectsNegativeT) {
  EXPECT_THROW(barrier_polar(-0.1, 0.2, FracOrder(0.5)), std::invalid_argument);
  EXPECT_THROW(barrier_halfspace_field({0, 0}, {2, 0}, graded_grid(HalfBall{}, FracOrder(0.5), 8), FracOrder(0.5)),
               std::invalid_argument);
}
