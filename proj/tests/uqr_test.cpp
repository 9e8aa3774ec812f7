#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "uniperf/uqr/julia.hpp"
#include "uniperf/uqr/probes.hpp"

using namespace uniperf;
using namespace uniperf::uqr;

namespace {

ExtendedPoint random_shell_point(std::mt19937_64& g, double lo, double hi) {
  std::normal_distribution<double> n;
  const double x = n(g), y = n(g), z = n(g), s = std::hypot(x, y, z);
  const double r = std::uniform_real_distribution<double>(lo, hi)(g);
  return {r * x / s, r * y / s, r * z / s};
}

double distance_to_segment(const ExtendedPoint& p) {
  const double x = std::clamp(p[0], -2.0, 2.0);
  return std::hypot(p[0] - x, p[1]);
}

}  // namespace

TEST(Apply, PlanarExamples) {
  const auto f = map_preset("power2");
  EXPECT_EQ(apply(f, ExtendedPoint{2.0, 0.0}), (ExtendedPoint{4.0, 0.0}));
  EXPECT_EQ(apply_composed(f, ExtendedPoint{2.0, 0.0}, 3), (ExtendedPoint{256.0, 0.0}));
  EXPECT_EQ(apply(map_preset("quad:-2"), ExtendedPoint{2.0, 0.0}), (ExtendedPoint{2.0, 0.0}));
  EXPECT_TRUE(apply(f, ExtendedPoint::infinity(2)).is_infinite());
}

TEST(Apply, ChebyshevConjugacy) {
  const auto f = map_preset("cheb3");
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int t = 0; t < 200; ++t) {
    const std::complex<double> w(u(g), u(g));
    if (std::abs(w) < 0.2) continue;
    const auto z = 0.5 * (w + 1.0 / w);
    const auto lhs = apply(f, ExtendedPoint{z.real(), z.imag()});
    const auto rhs = 0.5 * (std::pow(w, 3) + std::pow(w, -3));
    EXPECT_NEAR(lhs[0], rhs.real(), 1e-9 * std::max(1.0, std::abs(rhs)));
    EXPECT_NEAR(lhs[1], rhs.imag(), 1e-9 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Apply, ZorichRadiusSquares) {
  const auto f = map_preset("zorich2");
  std::mt19937_64 g(32);
  for (int t = 0; t < 200; ++t) {
    const auto y = random_shell_point(g, 3.0, 3.0);
    EXPECT_NEAR(apply(f, y).norm(), 9.0, 1e-9);
  }
  EXPECT_EQ(apply(f, ExtendedPoint::origin(3)), ExtendedPoint::origin(3));
  EXPECT_TRUE(apply(f, ExtendedPoint::infinity(3)).is_infinite());
  EXPECT_THROW(apply(f, ExtendedPoint{1.0, 0.0}), DimensionMismatch);
}

TEST(Apply, ZorichRadialConjugacyOnRandomPoints) {
  const auto f = map_preset("zorich2");
  std::mt19937_64 g(33);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto y = random_shell_point(g, 0.2, 5.0);
    worst = std::max(worst, std::abs(std::log(apply(f, y).norm()) - 2.0 * std::log(y.norm())));
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Apply, SemigroupMatchesComposedStep) {
  std::mt19937_64 g(34);
  const auto f = map_preset("zorich2");
  for (int t = 0; t < 500; ++t) {
    const auto y = random_shell_point(g, 0.7, 1.3);
    const auto a = apply(f, apply(f, y)), b = apply_composed(f, y, 2);
    const double scale = std::max(1.0, b.norm());
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(a[k], b[k], 1e-10 * scale);
  }
  const auto q = map_preset("quad:-1");
  const ExtendedPoint z{0.3, 0.2};
  EXPECT_EQ(apply(q, apply(q, z)), apply_composed(q, z, 2));
}

TEST(Zorich, RadialValues) {
  EXPECT_NEAR(std::hypot(zorich({0, 0, 0})[0], zorich({0, 0, 0})[1], zorich({0, 0, 0})[2]), 1.0, 1e-15);
  for (double t : {-1.0, 0.0, 1.0}) {
    const auto z = zorich({0.0, 0.0, t});
    EXPECT_NEAR(std::hypot(z[0], z[1], z[2]), std::exp(t), 1e-15);
  }
}

TEST(Zorich, ModulusIsExponentialOfHeight) {
  std::mt19937_64 g(35);
  std::uniform_real_distribution<double> u(-7.0, 7.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec3d x{u(g), u(g), 0.3 * u(g)};
    const auto z = zorich(x);
    EXPECT_NEAR(std::hypot(z[0], z[1], z[2]) / std::exp(x[2]), 1.0, 1e-14);
  }
}

TEST(Zorich, InverseRoundTrip) {
  std::mt19937_64 g(36);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto y = random_shell_point(g, 0.5, 2.0);
    const auto c = zorich_inverse({y[0], y[1], y[2]});
    EXPECT_LE(std::abs(c.a), 1.0);
    EXPECT_LE(std::abs(c.b), 1.0);
    const auto z = zorich(c.embed());
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(z[k] - y[k]));
  }
  EXPECT_LT(worst, 1e-9);
  EXPECT_THROW(zorich_inverse({0.0, 0.0, 0.0}), PreconditionError);
}

TEST(Zorich, InjectiveOnTheFundamentalBeam) {
  std::mt19937_64 g(37);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 5000; ++t) {
    const Vec3d x{u(g), u(g), u(g)}, y{u(g), u(g), u(g)};
    const double dx = std::hypot(x[0] - y[0], x[1] - y[1], x[2] - y[2]);
    const auto a = zorich(x), b = zorich(y);
    worst = std::min(worst, std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]) / dx);
  }
  // Lower Lipschitz bound: e^{-1} for the height times the beam map's co-Lipschitz constant.
  EXPECT_GT(worst, 0.05);
}

TEST(Zorich, ReflectionsMatchAcrossBeamFaces) {
  // Continuity across the face x1 = 1 between beams 0 and 1.
  for (double b : {-0.7, 0.0, 0.4})
    for (double t : {-0.5, 0.5}) {
      const auto l = zorich({1.0 - 1e-12, b, t}), r = zorich({1.0 + 1e-12, b, t});
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(l[k], r[k], 1e-9);
    }
}

TEST(ClassifyOrbit, Examples) {
  const auto p = map_preset("power2");
  EXPECT_EQ(classify_orbit(p, ExtendedPoint{0.5, 0.0}, 100).label, OrbitLabel::Bounded);
  const auto esc = classify_orbit(p, ExtendedPoint{2.0, 0.0}, 100);
  EXPECT_EQ(esc.label, OrbitLabel::Escaped);
  EXPECT_GT(esc.final_point.norm(), p.escape_radius);
  const auto z = map_preset("zorich2");
  EXPECT_EQ(classify_orbit(z, ExtendedPoint{0.9, 0.0, 0.0}, 100).label, OrbitLabel::Bounded);
  EXPECT_EQ(classify_orbit(z, ExtendedPoint{0.0, 0.6, 0.7}, 100).label, OrbitLabel::Bounded);
  EXPECT_EQ(classify_orbit(z, ExtendedPoint{1.1, 0.0, 0.0}, 100).label, OrbitLabel::Escaped);
  const auto r = classify_orbit(map_preset("quad:-1"), ExtendedPoint{0.0, 0.0}, 101);
  EXPECT_EQ(r.label, OrbitLabel::Bounded);
  EXPECT_EQ(r.final_point, (ExtendedPoint{-1.0, 0.0}));
}

TEST(SampleJulia, PowerTwoOnUnitCircle) {
  const auto c = sample_julia(map_preset("power2"), 10000, 7);
  ASSERT_EQ(c.size(), 10000u);
  for (const auto& p : c.points) ASSERT_NEAR(p.norm(), 1.0, 1e-5);
  EXPECT_EQ(c.get("seed"), "7");
  EXPECT_EQ(c.get("generator"), "sample_julia");
}

TEST(SampleJulia, QuadMinusTwoOnSegment) {
  const auto c = sample_julia(map_preset("quad:-2"), 5000, 3);
  for (const auto& p : c.points) ASSERT_LT(distance_to_segment(p), 1e-4);
}

TEST(SampleJulia, ZorichOnUnitSphere) {
  const auto c = sample_julia(map_preset("zorich2"), 300, 5);
  EXPECT_EQ(c.dim, 3);
  for (const auto& p : c.points) ASSERT_NEAR(p.norm(), 1.0, 1e-5);
}

TEST(SampleJulia, RayBisectionOnPlanarPower) {
  const auto c = sample_julia(map_preset("power3"), 200, SamplingMethod::RayBisection, 2);
  for (const auto& p : c.points) ASSERT_NEAR(p.norm(), 1.0, 1e-5);
}

TEST(SampleJulia, MethodFamilyMismatchThrows) {
  EXPECT_THROW(sample_julia(map_preset("zorich2"), 10, SamplingMethod::InverseIteration, 1), PreconditionError);
  EXPECT_THROW(sample_julia(map_preset("quad:-1"), 10, SamplingMethod::RayBisection, 1), PreconditionError);
  EXPECT_THROW(sample_julia(map_preset("power2"), 0, 1), OutOfRange);
}

TEST(SampleJulia, SamplesAreCompletelyInvariant) {
  const auto c = sample_julia(map_preset("power2"), 2000, 11);
  const auto f = map_preset("power2");
  for (const auto& p : c.points) ASSERT_NEAR(apply(f, p).norm(), 1.0, 3e-5);
  const auto s = sample_julia(map_preset("quad:-2"), 2000, 12);
  const auto q = map_preset("quad:-2");
  for (const auto& p : s.points) ASSERT_LT(distance_to_segment(apply(q, p)), 1e-3);
  const auto z = map_preset("zorich2");
  for (const auto& p : sample_julia(z, 100, 13).points) ASSERT_NEAR(apply(z, p).norm(), 1.0, 3e-5);
}

TEST(SampleJulia, DeterministicUnderSeed) {
  for (const char* name : {"power2", "quad:-1", "zorich2"}) {
    const auto m = map_preset(name);
    const int budget = m.dim == 3 ? 50 : 1000;
    const auto a = sample_julia(m, budget, 9), b = sample_julia(m, budget, 9);
    EXPECT_EQ(a.points, b.points) << name;
    EXPECT_EQ(a.meta, b.meta) << name;
  }
}

TEST(SampleJuliaDepth, PreimageTreeSizes) {
  EXPECT_EQ(sample_julia_depth(map_preset("power2"), 6, 1).size(), 64u);
  EXPECT_EQ(sample_julia_depth(map_preset("quad:-10"), 5, 1).size(), 32u);
  EXPECT_EQ(sample_julia_depth(map_preset("zorich2"), 5, 1).size(), 32u);
  EXPECT_THROW(sample_julia_depth(map_preset("power2"), 0, 1), OutOfRange);
}

TEST(SampleJuliaDepth, QuadMinusTwoStaysOnSegment) {
  for (const auto& p : sample_julia_depth(map_preset("quad:-2"), 10, 1).points) ASSERT_LT(distance_to_segment(p), 1e-9);
}

TEST(MapPreset, UnknownNameThrows) {
  EXPECT_THROW(map_preset("nosuch"), InputError);
  EXPECT_THROW(map_preset("power1"), InputError);
  for (const auto& n : builtin_presets()) EXPECT_EQ(map_preset(n).name, n);
}

TEST(MapPreset, DescriptorInvariants) {
  for (const auto& n : builtin_presets()) {
    const auto m = map_preset(n);
    EXPECT_GE(m.K, 1.0);
    EXPECT_GT(m.holder_alpha, 0.0);
    EXPECT_LE(m.holder_alpha, 1.0);
    if (m.family == Family::ZorichPower) {
      EXPECT_GT(m.K, 1.0);
      EXPECT_NEAR(m.holder_alpha, std::pow(m.K, 1.0 / (1.0 - m.dim)), 1e-15);
    } else {
      EXPECT_EQ(m.K, 1.0);
    }
  }
}

TEST(HolderProbe, PlanarPowerGenericCentreIsLipschitz) {
  const auto p = holder_scaling_probe(map_preset("power2"), ExtendedPoint{0.7, 0.3}, {0.1, 0.05, 0.025, 0.0125});
  EXPECT_NEAR(p.exponent, 1.0, 0.1);
}

TEST(HolderProbe, PlanarPowerAtCriticalPointScalesQuadratically) {
  const auto p = holder_scaling_probe(map_preset("power2"), ExtendedPoint{0.0, 0.0}, {0.1, 0.05, 0.025, 0.0125});
  EXPECT_NEAR(p.exponent, 2.0, 1e-6);
}

TEST(HolderProbe, ZorichAboveHolderAlpha) {
  const auto m = map_preset("zorich2");
  const double s = 1.0 / std::sqrt(3.0);
  const auto p = holder_scaling_probe(m, ExtendedPoint{s, s, s}, {0.05, 0.025, 0.0125, 0.00625});
  EXPECT_GE(p.exponent, m.holder_alpha - 0.1);
}

TEST(HolderProbe, RejectsNonDecreasingRadii) {
  EXPECT_THROW(holder_scaling_probe(map_preset("power2"), ExtendedPoint{0.5, 0.5}, {0.1, 0.1}), PreconditionError);
  EXPECT_THROW(holder_scaling_probe(map_preset("power2"), ExtendedPoint{0.5, 0.5}, {0.1, 0.2}), PreconditionError);
}

TEST(DilatationProbe, PlanarPowerIsConformal) {
  std::mt19937_64 g(38);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (const char* name : {"power2", "power3"}) {
    std::vector<ExtendedPoint> pts;
    for (int i = 0; i < 200; ++i) pts.push_back({u(g), u(g)});
    const auto d = dilatation_probe(map_preset(name), pts, 1e-6);
    EXPECT_NEAR(d.K, 1.0, 0.05) << name;
  }
}

TEST(DilatationProbe, ZorichBelowDeclaredBound) {
  const auto m = map_preset("zorich2");
  std::mt19937_64 g(39);
  std::vector<ExtendedPoint> pts;
  for (int i = 0; i < 1000; ++i) pts.push_back(random_shell_point(g, 0.5, 2.0));
  const auto d = dilatation_probe(m, pts, 1e-7);
  EXPECT_LE(d.K, m.K * 1.1);
  EXPECT_LT(d.skipped, pts.size() / 10);
}

TEST(DilatationProbe, BeamEdgeSampleIsSkipped) {
  const double s = std::sqrt(0.5);
  const auto d = dilatation_probe(map_preset("zorich2"), {ExtendedPoint{s, s, 0.0}}, 1e-6);
  ASSERT_EQ(d.samples.size(), 1u);
  EXPECT_TRUE(d.samples[0].skipped);
  EXPECT_FALSE(d.samples[0].diagnostic.empty());
  EXPECT_EQ(d.skipped, 1u);
}

TEST(DilatationProbe, CriticalPointIsSkipped) {
  const auto d = dilatation_probe(map_preset("power2"), {ExtendedPoint{0.0, 0.0}}, 1e-6);
  EXPECT_TRUE(d.samples[0].skipped);
}
