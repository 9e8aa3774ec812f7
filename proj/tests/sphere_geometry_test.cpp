#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "uniperf/sphere_geometry.hpp"

using namespace uniperf;

namespace {

double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

ExtendedPoint random_point(std::mt19937_64& g, int n, double scale) {
  double c[3];
  for (int k = 0; k < n; ++k) c[k] = scale * uniform(g, -1.0, 1.0);
  return ExtendedPoint(std::span<const double>(c, static_cast<std::size_t>(n)));
}

}  // namespace

TEST(ChordalDistance, OriginToInfinityIsOne) {
  EXPECT_DOUBLE_EQ(chordal_distance(ExtendedPoint{0.0, 0.0}, ExtendedPoint::infinity(2)), 1.0);
}

TEST(ChordalDistance, OriginToUnitVector) {
  EXPECT_NEAR(chordal_distance(ExtendedPoint{0.0, 0.0}, ExtendedPoint{1.0, 0.0}), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(ChordalDistance, IdentityIsZero) {
  const ExtendedPoint x{0.3, -2.0, 1.5};
  EXPECT_EQ(chordal_distance(x, x), 0.0);
}

TEST(ChordalDistance, DimensionMismatchThrows) {
  EXPECT_THROW(chordal_distance(ExtendedPoint{0.0, 0.0}, ExtendedPoint{0.0, 0.0, 0.0}), DimensionMismatch);
}

TEST(ChordalDistance, MetricPropertiesOnRandomTriples) {
  std::mt19937_64 g(11);
  for (int n : {2, 3})
    for (int t = 0; t < 2000; ++t) {
      const auto x = random_point(g, n, 5.0), y = random_point(g, n, 5.0), z = random_point(g, n, 5.0);
      EXPECT_EQ(chordal_distance(x, y), chordal_distance(y, x));
      EXPECT_LE(chordal_distance(x, z), chordal_distance(x, y) + chordal_distance(y, z) + 1e-12);
      EXPECT_LE(chordal_distance(x, y), 1.0);
    }
}

TEST(ChordalDistance, AntipodalPairsReachOne) {
  // The antipode of x under stereographic projection is -x / |x|^2.
  std::mt19937_64 g(12);
  for (int t = 0; t < 200; ++t) {
    const auto x = random_point(g, 3, 3.0);
    const double q = x.norm2();
    const ExtendedPoint a{-x[0] / q, -x[1] / q, -x[2] / q};
    EXPECT_NEAR(chordal_distance(x, a), 1.0, 1e-12);
    const auto y = random_point(g, 3, 3.0);
    if (chordal_distance(y, a) > 1e-3) { EXPECT_LT(chordal_distance(x, y), 1.0); }
  }
}

TEST(EuclideanRingModulus, Values) {
  EXPECT_NEAR(euclidean_ring_modulus(RoundRing(ExtendedPoint{0.0, 0.0}, 1.0, std::exp(1.0))), 1.0, 1e-15);
  EXPECT_NEAR(euclidean_ring_modulus(RoundRing(ExtendedPoint{0.0, 0.0}, 0.5, 9.5)), std::log(19.0), 1e-15);
  EXPECT_THROW(euclidean_ring_modulus(RoundRing(ExtendedPoint{0.0, 0.0}, 2.0, 2.0)), DegenerateRing);
}

TEST(EuclideanRingModulus, AdditiveOverConcentricSplits) {
  std::mt19937_64 g(13);
  for (int t = 0; t < 500; ++t) {
    const double u = uniform(g, 0.01, 1.0), v = u * uniform(g, 1.01, 5.0), w = v * uniform(g, 1.01, 5.0);
    EXPECT_NEAR(euclidean_ring_modulus(u, v) + euclidean_ring_modulus(v, w), euclidean_ring_modulus(u, w), 1e-12);
  }
}

TEST(ChordalRingModulus, Values) {
  EXPECT_NEAR(chordal_ring_modulus(0.1, 0.5), std::log(5.0 * std::sqrt(0.99 / 0.75)), 1e-14);
  EXPECT_NEAR(chordal_ring_modulus(0.1, 0.5), 1.7483, 1e-4);
  EXPECT_THROW(chordal_ring_modulus(0.1, 1.0), OutOfRange);
  EXPECT_THROW(chordal_ring_modulus(0.1, 0.1), DegenerateRing);
}

TEST(ChordalRingModulus, DominatesHalvedEuclideanBound) {
  std::mt19937_64 g(14);
  for (int t = 0; t < 2000; ++t) {
    const double w = uniform(g, 0.01, 0.99), u = w * uniform(g, 0.001, 0.999);
    if ((1.0 - u * u) / (1.0 - w * w) >= 0.25) { EXPECT_GE(chordal_ring_modulus(u, w), std::log(w / (2.0 * u)) - 1e-12); }
  }
}

TEST(ModulusMonotonicity, NestedRings) {
  const ExtendedPoint c{0.0, 0.0};
  EXPECT_TRUE(modulus_monotonicity_check(RoundRing(c, 1.0, 2.0), RoundRing(c, 0.5, 4.0)));
  EXPECT_TRUE(modulus_monotonicity_check(RoundRing(c, 1.0, 2.0), RoundRing(c, 1.0, 2.0)));
  EXPECT_THROW(modulus_monotonicity_check(RoundRing(c, 0.5, 4.0), RoundRing(c, 1.0, 2.0)), PreconditionError);
}

TEST(ModulusMonotonicity, RandomNestedPairs) {
  std::mt19937_64 g(15);
  const ExtendedPoint c{0.2, -0.1, 0.4};
  for (int t = 0; t < 500; ++t) {
    const double U = uniform(g, 0.01, 0.4), W = uniform(g, 0.5, 0.95);
    const double u = uniform(g, U, 0.45), w = uniform(g, 0.5, W);
    EXPECT_TRUE(modulus_monotonicity_check(RoundRing(c, u, w), RoundRing(c, U, W)));
    EXPECT_TRUE(modulus_monotonicity_check(RoundRing(c, u, w, Metric::Chordal), RoundRing(c, U, W, Metric::Chordal)));
  }
}

TEST(MoebiusInversion, FixedAndSpecialPoints) {
  const MoebiusInversion g(ExtendedPoint{0.0, 0.0});
  EXPECT_EQ(g(ExtendedPoint{1.0, 0.0}), (ExtendedPoint{1.0, 0.0}));
  EXPECT_EQ(g(ExtendedPoint::infinity(2)), (ExtendedPoint{0.0, 0.0}));
  EXPECT_TRUE(g(ExtendedPoint{0.0, 0.0}).is_infinite());
}

TEST(MoebiusInversion, IsAnInvolution) {
  std::mt19937_64 g(16);
  const MoebiusInversion inv(ExtendedPoint{0.3, -0.7, 0.2});
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto y = random_point(g, 3, 4.0);
    const auto z = inv(inv(y));
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(z[k] - y[k]) / std::max(1.0, y.norm()));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(MoebiusInversion, MapsChordalAnnulusToEqualModulus) {
  // Inversion at 0 is the chordal isometry x -> antipode composed with a reflection, so the
  // boundary spheres of A_chi(p, u, w) go to chordal spheres of the same radii about g(p).
  const ExtendedPoint p{0.4, 0.3};
  const MoebiusInversion g(ExtendedPoint{0.0, 0.0});
  const auto q = g(p);
  for (double r : {0.1, 0.35}) {
    for (int i = 0; i < 64; ++i) {
      const double th = 2.0 * std::numbers::pi * i / 64;
      // Point at chordal distance r from p along direction th, by bisection on the ray.
      double lo = 0.0, hi = 50.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (chordal_distance(p, ExtendedPoint{p[0] + mid * std::cos(th), p[1] + mid * std::sin(th)}) < r ? lo : hi) = mid;
      }
      const ExtendedPoint y{p[0] + lo * std::cos(th), p[1] + lo * std::sin(th)};
      EXPECT_NEAR(chordal_distance(q, g(y)), r, 1e-9);
    }
  }
  EXPECT_NEAR(chordal_ring_modulus(0.1, 0.35), chordal_ring_modulus(RoundRing(q, 0.1, 0.35, Metric::Chordal)), 0.0);
}

TEST(ChordalRecentering, IsAnIsometryTakingCentreToOrigin) {
  std::mt19937_64 g(17);
  const ExtendedPoint x{1.3, -0.4, 0.8};
  const ChordalRecentering A(x);
  const auto ax = A(x);
  EXPECT_LT(ax.norm(), 1e-12);
  for (int t = 0; t < 500; ++t) {
    const auto y = random_point(g, 3, 4.0), z = random_point(g, 3, 4.0);
    EXPECT_NEAR(chordal_distance(A(y), A(z)), chordal_distance(y, z), 1e-12);
  }
}

TEST(SphereSurfaceArea, Constants) {
  EXPECT_DOUBLE_EQ(sphere_surface_area(2), 2.0 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(sphere_surface_area(3), 4.0 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(sphere_surface_area(4), 2.0 * std::numbers::pi * std::numbers::pi);
  EXPECT_THROW(sphere_surface_area(5), OutOfRange);
}

TEST(CapacityModulus, RoundTrip) {
  for (int n : {2, 3})
    for (double m : {0.3, 1.0, 2.5}) EXPECT_NEAR(capacity_to_modulus(modulus_to_capacity(m, n), n), m, 1e-12);
}
