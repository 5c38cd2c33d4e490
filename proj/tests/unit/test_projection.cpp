#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "csxlab/projection.hpp"

using namespace csxlab;

class ProjectionCases : public ::testing::TestWithParam<std::tuple<double, int>> {
 protected:
  FracOrder order() const { return FracOrder(std::get<0>(GetParam()), std::get<1>(GetParam())); }
};

TEST_P(ProjectionCases, PureBarrierRecoversCoefficient) {
  const auto o = order();
  const Point x0{0.3, o.dim() == 2 ? 0.1 : 0.0};
  const Point nu = o.dim() == 2 ? Point{0.6, 0.8} : Point{1.0, 0.0};
  auto g = graded_grid(HalfBall{x0, 0.25, nu}, o, 12);
  auto H = barrier_halfspace_field(x0, nu, g, o);
  EXPECT_NEAR(project_coefficient(-1.75 * H, x0, nu, 0.25), -1.75, 1e-12);
  auto rep = projection_limit(analytic_sampler([&](double t, const Point& x) { return 0.8 * barrier_halfspace(t, x, x0, nu, o); }),
                              x0, nu, 0.4, 4, o, 10);
  EXPECT_TRUE(rep.exact);
  EXPECT_NEAR(rep.q_limit, 0.8, 1e-12);
}

TEST_P(ProjectionCases, ResidualIsOrthogonalityDefect) {
  const auto o = order();
  const Point x0{0, 0};
  const Point nu = o.dim() == 2 ? Point{0, 1} : Point{1, 0};
  auto g = graded_grid(HalfBall{x0, 0.5, nu}, o, 10);
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> v(g->size());
    for (auto& x : v) x = n(rng);
    ExtensionField W(g, v);
    const double res = projection_residual(W, x0, nu, 0.5);
    EXPECT_LE(std::abs(res), 1e-9 * projection_scale(W, x0, nu, 0.5));
  }
}

TEST_P(ProjectionCases, CoefficientConvergesWithDecayingIncrements) {
  const auto o = order();
  const Point x0{0, 0}, nu{1, 0};
  // a smooth multiplicative perturbation moves Q_r by O(r)
  auto W = analytic_sampler([&](double t, const Point& x) {
    return barrier_halfspace(t, x, x0, nu, o) * (1.0 + 0.5 * x[0] + 0.3 * t);
  });
  auto rep = projection_limit(W, x0, nu, 0.4, 5, o, 10);
  EXPECT_TRUE(rep.cauchy);
  EXPECT_FALSE(rep.exact);
  EXPECT_NEAR(rep.q_limit, 1.0, 1e-3);
  EXPECT_NEAR(rep.increment_exponent, 1.0, 0.1);
  for (std::size_t k = 1; k < rep.increments.size(); ++k) EXPECT_LT(rep.increments[k], rep.increments[k - 1]);
}

INSTANTIATE_TEST_SUITE_P(Orders, ProjectionCases,
                         ::testing::Combine(::testing::Values(0.25, 0.5, 0.75), ::testing::Values(1, 2)));

TEST(Projection, RadiusBelowGridFloorIsRejected) {
  const FracOrder o(0.5);
  auto g = graded_grid(HalfBall{{0, 0}, 1.0, {1, 0}}, o, 8);
  auto H = barrier_halfspace_field({0, 0}, {1, 0}, g, o);
  EXPECT_THROW(project_coefficient(H, {0, 0}, {1, 0}, 1e-6), ProjectionError);
  EXPECT_THROW(project_coefficient(H, {0, 0}, {1, 0}, -1.0), std::invalid_argument);
}

TEST(Projection, BlowupOfBarrierIsZeroAndOfPerturbationIsNormalised) {
  const FracOrder o(0.5);
  const Point x0{0, 0}, nu{1, 0};
  auto pure = analytic_sampler([&](double t, const Point& x) { return 2 * barrier_halfspace(t, x, x0, nu, o); });
  auto b0 = blowup_rescale(pure, x0, nu, 0.1, 0.05, 0.0, o, 10);
  EXPECT_TRUE(b0.zero);
  auto bumped = analytic_sampler([&](double t, const Point& x) { return 2 * barrier_halfspace(t, x, x0, nu, o) + t * t; });
  auto b1 = blowup_rescale(bumped, x0, nu, 0.1, 0.05, 0.0, o, 10);
  EXPECT_FALSE(b1.zero);
  EXPECT_NEAR(b1.field.sup_norm(), 1.0, 1e-12);
  EXPECT_NEAR(b1.field.grid()->t_nodes().back(), 1.0, 1e-15);
}
