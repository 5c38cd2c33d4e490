#include <gtest/gtest.h>

#include <random>

#include "csxlab/geometry.hpp"

using namespace csxlab;

TEST(Geometry, IntervalDistances) {
  auto g = DomainGeometry::interval(-1, 1);
  EXPECT_DOUBLE_EQ(g.delta({0.25, 0}), 0.75);
  EXPECT_DOUBLE_EQ(g.delta({1.5, 0}), 0.0);
  EXPECT_DOUBLE_EQ(g.signed_distance({1.5, 0}), -0.5);
  EXPECT_DOUBLE_EQ(g.d_dist(0.3, {0.6, 0}), 0.5);
  auto b = g.nearest_boundary({0.8, 0});
  EXPECT_EQ(b.x0, (Point{1, 0}));
  EXPECT_EQ(b.nu, (Point{-1, 0}));
}

TEST(Geometry, DiskNearestBoundary) {
  auto g = DomainGeometry::disk({0, 0}, 1);
  auto b = g.nearest_boundary({0.0, 0.7});
  EXPECT_NEAR(b.x0[1], 1.0, 1e-15);
  EXPECT_NEAR(b.nu[1], -1.0, 1e-15);
  EXPECT_NEAR(g.delta({0.0, 0.7}), 0.3, 1e-15);
  EXPECT_THROW(g.nearest_boundary({0.1, 0.1}), GeometryError);
}

TEST(Geometry, HalfSpaceIsItsOwnLinearization) {
  auto g = DomainGeometry::half_space({0.2, 0}, {1, 0}, 1);
  for (double x : {-1.0, 0.2, 0.9, 3.0}) EXPECT_DOUBLE_EQ(g.delta({x, 0}), linearized_delta({x, 0}, {0.2, 0}, {1, 0}));
}

TEST(Geometry, ConvexDomainBelowEverySupportingHalfSpace) {
  auto g = DomainGeometry::disk({0.1, -0.2}, 1.3);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5), ph(0, 6.283185307179586);
  for (int k = 0; k < 500; ++k) {
    const Point x{u(rng), u(rng)};
    const double phi = ph(rng);
    const Point x0 = g.boundary_point(phi);
    const Point nu = g.inner_normal(phi);
    EXPECT_LE(g.delta(x), linearized_delta(x, x0, nu) + 1e-12);
  }
}

TEST(Geometry, PerturbedDiskNormalsAreUnit) {
  auto g = DomainGeometry::perturbed_disk({0, 0}, 1.0, 0.1, 0.8);
  for (double phi = -3.0; phi < 3.1; phi += 0.37) EXPECT_NEAR(norm(g.inner_normal(phi)), 1.0, 1e-12);
  EXPECT_GT(g.c11_bound(), 1.0);
}
