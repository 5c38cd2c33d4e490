#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include "csxlab/barrier.hpp"
#include "csxlab/kernels.hpp"

using namespace csxlab;

namespace {

// Mass of P(t, .) with y = t tan(θ) on [0, π/2].
double poisson_mass_oracle(double t, const FracOrder& o) {
  boost::math::quadrature::tanh_sinh<double> rule;
  auto f = [&](double th, double thc) {
    // thc is the distance to the nearer endpoint; near π/2, cosθ = sin(thc)
    const double c = th > 0.25 * std::numbers::pi ? std::sin(std::abs(thc)) : std::cos(th);
    const double y = t * std::sin(th) / c, jac = t / (c * c);
    const double p = poisson_kernel(t, {y, 0}, o) * jac;
    const double v = o.dim() == 1 ? 2 * p : 2 * std::numbers::pi * y * p;
    return std::isfinite(v) ? v : 0.0;
  };
  return rule.integrate(f, 0.0, 0.5 * std::numbers::pi, 1e-14);
}

// Fourier-side value of (-Delta)^s exp(-|x|^2/2).
double gaussian_frac_laplacian(double r, const FracOrder& o) {
  const double h = 0.5 * o.dim(), s = o.s();
  return std::pow(2.0, s) * std::tgamma(h + s) / std::tgamma(h) * boost::math::hypergeometric_1F1(h + s, h, -0.5 * r * r);
}

}  // namespace

class KernelOrders : public ::testing::TestWithParam<std::tuple<double, int>> {
 protected:
  FracOrder order() const { return FracOrder(std::get<0>(GetParam()), std::get<1>(GetParam())); }
};

TEST_P(KernelOrders, PoissonKernelHasUnitMass) {
  for (double t : {0.1, 1.0, 10.0}) EXPECT_NEAR(poisson_mass_oracle(t, order()), 1.0, 1e-9);
}

TEST_P(KernelOrders, ExtensionOfHalfSpaceTraceIsTheBarrier) {
  const auto o = order();
  const Point x0{0.0, 0.0}, nu{1.0, 0.0};
  auto u = halfspace_profile(o, x0, nu);
  for (double t : {0.05, 0.5})
    for (double x : {-0.4, 0.0, 0.3}) {
      const double ref = barrier_polar(t, x, o);
      EXPECT_NEAR(extension_value(u, t, {x, 0.2}, o, 1e-9), ref, 2e-6 * std::max(ref, 0.1)) << t << " " << x;
    }
}

TEST_P(KernelOrders, FracLaplacianOfGaussian) {
  const auto o = order();
  for (double r : {0.0, 0.4, 1.3}) {
    const double ref = gaussian_frac_laplacian(r, o);
    EXPECT_NEAR(frac_laplacian_pv(gaussian(), {r, 0}, o, 0.5), ref, 1e-6 * std::abs(ref) + 1e-9) << r;
  }
}

TEST_P(KernelOrders, BallSolutionHasUnitFracLaplacian) {
  const auto o = order();
  auto u = ball_solution(o);
  for (double r : {0.0, 0.5}) EXPECT_NEAR(frac_laplacian_pv(u, {r, 0}, o, 0.25), 1.0, 1e-6) << r;
}

TEST_P(KernelOrders, ExtensionMaximumPrinciple) {
  const auto o = order();
  auto u = ball_solution(o);
  const double top = ball_solution_constant(o);
  GridPtr g = o.dim() == 1 ? graded_grid(Slab{1.0, {-1.5, 0}, {1.5, 0}, {-1, 1}, {}}, o, 10)
                           : graded_grid(DiskSlab{1.0, {0, 0}, 1.2}, o, 8);
  auto W = extend_function(u, g, o, 1e-8);
  for (std::size_t k = 0; k < W.size(); ++k) {
    EXPECT_GE(W[k], -1e-9);
    EXPECT_LE(W[k], top + 1e-9);
  }
}

INSTANTIATE_TEST_SUITE_P(Orders, KernelOrders,
                         ::testing::Combine(::testing::Values(0.25, 0.5, 0.75), ::testing::Values(1, 2)));

TEST(Kernels, ExtensionOfConstantIsConstant) {
  const FracOrder o(0.3, 2);
  EXPECT_DOUBLE_EQ(extension_value(constant_function(2.5), 0.7, {0.1, 0.2}, o), 2.5);
}

TEST(Kernels, FracNormalizationMatchesCalibration) {
  for (double s : {0.25, 0.5, 0.75})
    for (int N : {1, 2}) {
      const FracOrder o(s, N);
      EXPECT_NEAR(calibrate_frac_normalization(o) / frac_normalization(o), 1.0, 1e-7);
    }
}

TEST(Kernels, KinkAtEvaluationPointIsRejected) {
  const FracOrder o(0.5);
  EXPECT_THROW(frac_laplacian_pv(ball_profile(o), {1.0, 0}, o, 0.5), NonSmoothError);
}

TEST(Kernels, SamplerMatchesDirectExtension) {
  const FracOrder o(0.5, 2);
  auto u = ball_solution(o);
  auto g = graded_grid(HalfBall{{0.8, 0.6}, 0.2, {-0.8, -0.6}}, o, 8);
  ExtensionSampler S(u, o, 1e-8);
  auto a = S(g);
  auto b = extend_function(u, g, o, 1e-8);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
  const auto n = S.cached();
  S(g);
  EXPECT_EQ(S.cached(), n);
}
