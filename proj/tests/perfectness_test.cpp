#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "uniperf/perfectness.hpp"
#include "uniperf/samples.hpp"

using namespace uniperf;

namespace {

PointCloud line_cloud(const std::vector<double>& xs) {
  PointCloud c;
  c.dim = 2;
  for (double x : xs) c.points.push_back({x, 0.0});
  return c;
}

/// Best separating annulus for points on a line with centres on the line: for every pair of
/// consecutive points (a, b) and every split of the others, the optimum puts the centre so
/// that the inner and outer binding distances are as far apart in ratio as possible. Brute
/// force over centres on a fine grid with exact binding radii.
double line_optimum(const std::vector<double>& xs, double eps) {
  double best = 0.0;
  const double lo = *std::min_element(xs.begin(), xs.end()), hi = *std::max_element(xs.begin(), xs.end());
  const int steps = 20000;
  for (int s = 0; s <= steps; ++s) {
    const double c = lo + (hi - lo) * s / steps;
    std::vector<double> d;
    for (double x : xs) d.push_back(std::abs(x - c));
    std::sort(d.begin(), d.end());
    for (std::size_t i = 0; i + 1 < d.size(); ++i)
      if (d[i] >= eps && d[i + 1] > d[i]) best = std::max(best, std::log(d[i + 1] / d[i]));
  }
  return best;
}

}  // namespace

TEST(RadialGapScan, ThreePointsOnALine) {
  const auto c = line_cloud({0.0, 1.0, 10.0});
  const auto w = radial_gap_scan(c, Metric::Euclidean, 0.5);
  ASSERT_FALSE(w.empty());
  EXPECT_NEAR(w.front().modulus, std::log(10.0), 1e-12);
  EXPECT_EQ(w.front().ring.center, (ExtendedPoint{0.0, 0.0}));
  EXPECT_FALSE(w.front().floored);
}

TEST(RadialGapScan, EquallySpacedSegmentGivesLogTwo) {
  for (int m : {3, 5, 9, 17}) {
    std::vector<double> xs;
    for (int i = 0; i < m; ++i) xs.push_back(static_cast<double>(i));
    const auto w = radial_gap_scan(line_cloud(xs), Metric::Euclidean, 0.5);
    ASSERT_FALSE(w.empty());
    EXPECT_NEAR(w.front().modulus, std::log(2.0), 1e-12) << "m = " << m;
  }
}

TEST(RadialGapScan, TwoPointsOnlyGiveFlooredWitnesses) {
  const auto w = radial_gap_scan(line_cloud({0.0, 1.0}), Metric::Euclidean, 0.1);
  ASSERT_FALSE(w.empty());
  for (const auto& x : w) EXPECT_TRUE(x.floored);
  EXPECT_NEAR(w.front().modulus, std::log(10.0), 1e-12);
}

TEST(RadialGapScan, AllDistancesBelowFloorGiveNothing) {
  EXPECT_TRUE(radial_gap_scan(line_cloud({0.0, 0.01, 0.02}), Metric::Euclidean, 1.0).empty());
}

TEST(RadialGapScan, EveryWitnessSeparates) {
  std::mt19937_64 g(21);
  PointCloud c;
  c.dim = 2;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) c.points.push_back({u(g), u(g)});
  for (Metric m : {Metric::Euclidean, Metric::Chordal})
    for (const auto& w : radial_gap_scan(c, m, 0.01)) EXPECT_TRUE(witness_separates(w, c));
}

TEST(CenterSearch, ThreePointsFindsOffCentreRing) {
  const auto c = line_cloud({0.0, 1.0, 10.0});
  const auto w = center_optimized_search(c, Metric::Euclidean, 0.5, 2000, 1);
  EXPECT_NEAR(w.modulus, std::log(19.0), 1e-3);
  EXPECT_NEAR(w.ring.center[0], 0.5, 1e-3);
  EXPECT_TRUE(witness_separates(w, c));
}

TEST(CenterSearch, NeverBelowTheScan) {
  std::mt19937_64 g(22);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 5; ++t) {
    PointCloud c;
    c.dim = 2;
    for (int i = 0; i < 60; ++i) c.points.push_back({u(g), u(g)});
    const auto scan = radial_gap_scan(c, Metric::Euclidean, 0.02, 1);
    const auto w = center_optimized_search(c, Metric::Euclidean, 0.02, 500, 3);
    EXPECT_GE(w.modulus, scan.front().modulus - 1e-12);
    EXPECT_TRUE(witness_separates(w, c));
  }
}

TEST(CenterSearch, CollinearCloudsReachTheLineOptimum) {
  std::mt19937_64 g(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> xs;
    for (int i = 0; i < 7; ++i) xs.push_back(u(g));
    const double eps = 0.005;
    const auto w = center_optimized_search(line_cloud(xs), Metric::Euclidean, eps, 2000, 1);
    EXPECT_GE(w.modulus, line_optimum(xs, eps) - 2e-3);
  }
}

TEST(CenterSearch, RegularPolygonFallsBackToVertexWitnesses) {
  const auto c = circle_cloud(12);
  const auto w = center_optimized_search(c, Metric::Euclidean, 0.05, 500, 1);
  EXPECT_TRUE(witness_separates(w, c));
  EXPECT_GT(std::hypot(w.ring.center[0], w.ring.center[1]), 0.1);
}

TEST(CenterSearch, DeterministicUnderSeed) {
  const auto c = cantor_cloud(5);
  const auto a = center_optimized_search(c, Metric::Euclidean, 0.01, 300, 9);
  const auto b = center_optimized_search(c, Metric::Euclidean, 0.01, 300, 9);
  EXPECT_EQ(a.modulus, b.modulus);
  EXPECT_EQ(a.ring.center, b.ring.center);
}

TEST(RingToCentredAnnulus, TinyClusterAgainstFarSet) {
  PointCloud X;
  X.dim = 2;
  const std::vector<ExtendedPoint> E{{0.0, 0.0}, {0.01, 0.0}};
  // Points at chordal distance 0.5 from 0: Euclidean radius 1/sqrt(3).
  const double rf = 1.0 / std::sqrt(3.0);
  const std::vector<ExtendedPoint> F{{rf, 0.0}, {-rf, 0.0}, {0.0, rf}};
  for (const auto& p : E) X.points.push_back(p);
  for (const auto& p : F) X.points.push_back(p);
  const auto ring = ring_to_centered_annulus(E, F, X);
  EXPECT_EQ(ring.metric, Metric::Chordal);
  EXPECT_NEAR(ring.inner, chordal_distance(E[0], E[1]), 1e-15);
  EXPECT_GE(ring.outer, 0.5 - 1e-12);
  EXPECT_GE(chordal_ring_modulus(ring), std::log(ring.outer / (2.0 * ring.inner)));
  EXPECT_GE(chordal_ring_modulus(ring), std::log(25.0) - 0.01);
}

TEST(RingToCentredAnnulus, GateViolationThrows) {
  PointCloud X;
  X.dim = 2;
  const std::vector<ExtendedPoint> E{{0.0, 0.0}, {0.1, 0.0}};
  const std::vector<ExtendedPoint> F{{0.6, 0.0}, {0.6, 0.5}};
  for (const auto& p : E) X.points.push_back(p);
  for (const auto& p : F) X.points.push_back(p);
  EXPECT_THROW(ring_to_centered_annulus(E, F, X), PreconditionError);
}

TEST(RingToCentredAnnulus, RandomAdmissibleConfigurationsSeparate) {
  std::mt19937_64 g(24);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    const ExtendedPoint c{0.5 * u(g), 0.5 * u(g)};
    const double s = 0.02 * (1.5 + u(g));
    std::vector<ExtendedPoint> E, F;
    for (int i = 0; i < 4; ++i) E.push_back({c[0] + s * u(g), c[1] + s * u(g)});
    for (int i = 0; i < 8; ++i) {
      const double a = 3.14159 * u(g), r = 1.0 + 2.0 * (1.0 + u(g));
      F.push_back({c[0] + r * std::cos(a), c[1] + r * std::sin(a)});
    }
    PointCloud X;
    X.dim = 2;
    for (const auto& p : E) X.points.push_back(p);
    for (const auto& p : F) X.points.push_back(p);
    RoundRing ring;
    try {
      ring = ring_to_centered_annulus(E, F, X);
    } catch (const Error&) {
      continue;
    }
    SeparationWitness w;
    w.ring = ring;
    EXPECT_TRUE(witness_separates(w, X));
    const double a = ring.inner, b = ring.outer;
    if ((1.0 - a * a) / (1.0 - b * b) >= 0.25) { EXPECT_GE(chordal_ring_modulus(ring), std::log(b / (2.0 * a)) - 1e-12); }
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(BoundedAnnulusNormalization, Branches) {
  PointCloud X;
  X.dim = 2;
  X.points = {{0.0, 0.0}, {1.0, 0.0}};
  const double eta = chordal_eta(X);
  EXPECT_NEAR(eta, 1.0 / std::sqrt(2.0), 1e-15);
  const ExtendedPoint c{0.0, 0.0};
  const RoundRing small(c, 0.05, 0.2, Metric::Chordal);
  EXPECT_EQ(bounded_annulus_normalization(small, X, eta).outer, 0.2);
  const RoundRing wide(c, 0.05, 0.6, Metric::Chordal);
  EXPECT_NEAR(bounded_annulus_normalization(wide, X, eta).outer, 0.5 * eta, 1e-15);
  const RoundRing fat(c, 0.4, 0.6, Metric::Chordal);
  EXPECT_THROW(bounded_annulus_normalization(fat, X, eta), AnnulusDiscarded);
}

TEST(Analyze, CircleIsSmallAndStable) {
  const auto a = analyze(circle_cloud(512)), b = analyze(circle_cloud(1024));
  EXPECT_LE(a.alpha_hat, std::log(4.0));
  EXPECT_LT(std::abs(b.alpha_hat - a.alpha_hat) / a.alpha_hat, 0.05);
  EXPECT_FALSE(a.resolution_caveat);
}

TEST(Analyze, CantorDepthStable) {
  const auto a = analyze(cantor_cloud(8)), b = analyze(cantor_cloud(10));
  EXPECT_LT(std::abs(b.alpha_hat - a.alpha_hat) / a.alpha_hat, 0.10);
}

TEST(Analyze, MiddleLambdaCantorIncreasesWithLambda) {
  double prev = 0.0;
  for (double lambda : {1.0 / 3.0, 0.5, 2.0 / 3.0, 0.9}) {
    const double a = analyze(cantor_cloud(6, lambda)).alpha_hat;
    EXPECT_GT(a, prev) << "lambda " << lambda;
    prev = a;
  }
}

TEST(Analyze, TwoPointsCarryTheCaveat) {
  const auto r = analyze(line_cloud({0.0, 1.0}));
  EXPECT_TRUE(r.resolution_caveat);
}

TEST(Analyze, ReportInvariants) {
  const auto c = cantor_cloud(6);
  const auto r = analyze(c);
  ASSERT_FALSE(r.witnesses.empty());
  EXPECT_EQ(r.alpha_hat, r.witnesses.front().modulus);
  for (const auto& w : r.witnesses) {
    EXPECT_TRUE(witness_separates(w, c));
    EXPECT_FALSE(w.side_inner.empty());
    EXPECT_FALSE(w.side_outer.empty());
  }
  for (std::size_t i = 1; i < r.witnesses.size(); ++i) EXPECT_FALSE(witness_before(r.witnesses[i], r.witnesses[i - 1]));
  // Refinement series: floors decreasing, alpha non-decreasing.
  for (std::size_t i = 1; i < r.refinement.size(); ++i) {
    EXPECT_LT(r.refinement[i].first, r.refinement[i - 1].first);
    EXPECT_GE(r.refinement[i].second, r.refinement[i - 1].second);
  }
}

TEST(Analyze, SmallCloudsAgreeAcrossMetrics) {
  auto c = cantor_cloud(6);
  for (auto& p : c.points) p = ExtendedPoint{0.1 * p[0] - 0.05, 0.0};
  c.set("sampling_scale", std::to_string(0.1 * std::pow(3.0, -6)));
  const auto r = analyze(c);
  EXPECT_NEAR(r.alpha_chordal, r.alpha_euclidean, 0.05 * r.alpha_euclidean);
}

TEST(Analyze, DenserSampleOfTheSameSetDoesNotIncreaseAlpha) {
  // The depth-8 Cantor centres refine the depth-6 ones, so at a common floor every
  // separating annulus of the denser cloud also separates the coarser one.
  AnalyzeConfig cfg;
  cfg.epsilon = 2.0 * std::pow(3.0, -6);
  const double coarse = analyze(cantor_cloud(6), cfg).alpha_hat;
  const double fine = analyze(cantor_cloud(8), cfg).alpha_hat;
  EXPECT_LE(fine, coarse * (1.0 + 0.05));
}

TEST(Analyze, Deterministic) {
  const auto c = cantor_cloud(6);
  const auto a = analyze(c), b = analyze(c);
  EXPECT_EQ(a.alpha_hat, b.alpha_hat);
  EXPECT_EQ(a.witnesses.size(), b.witnesses.size());
}
