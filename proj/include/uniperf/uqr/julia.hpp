#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "uniperf/error.hpp"
#include "uniperf/point_cloud.hpp"
#include "uniperf/uqr/maps.hpp"

namespace uniperf::uqr {

enum class SamplingMethod { InverseIteration, RayBisection };

inline const char* to_string(SamplingMethod m) {
  return m == SamplingMethod::InverseIteration ? "inverse_iteration" : "ray_bisection";
}

inline SamplingMethod default_method(const MapDescriptor& m) {
  return m.family == Family::ZorichPower ? SamplingMethod::RayBisection : SamplingMethod::InverseIteration;
}

struct JuliaOptions {
  int transient = 20;
  double bisection_tol = 1e-6;
  int bisection_iterations = 64;  // orbit budget per classification
};

namespace detail {

inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

/// Preimage number `branch` (0 <= branch < degree) of z.
inline std::complex<double> inverse_branch(const MapDescriptor& m, std::complex<double> z, int branch) {
  const double turn = 2.0 * std::numbers::pi * branch / m.degree;
  switch (m.family) {
    case Family::PlanarPower:
      return std::pow(z, 1.0 / m.degree) * std::polar(1.0, turn);
    case Family::Quadratic: {
      const auto r = std::sqrt(z - m.c);
      return branch ? -r : r;
    }
    case Family::PlanarChebyshev: {
      const auto u = z + std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
      const auto w = std::pow(u, 1.0 / m.degree) * std::polar(1.0, turn);
      return 0.5 * (w + 1.0 / w);
    }
    case Family::ZorichPower: break;
  }
  throw PreconditionError("inverse iteration needs a planar family");
}

/// Largest nearest-neighbour distance: every sample has another sample at most this far away.
inline double cloud_spacing(const PointCloud& c) {
  double s = 0.0;
  for (double d : nearest_neighbor_distances(c))
    if (std::isfinite(d)) s = std::max(s, d);
  return s;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Boundary point of the basin of 0 along the unit direction u, to o.bisection_tol.
inline ExtendedPoint bisect_ray(const MapDescriptor& m, const Vec3d& u, const JuliaOptions& o) {
  auto at = [&](double r) {
    return m.dim == 2 ? ExtendedPoint{r * u[0], r * u[1]} : ExtendedPoint{r * u[0], r * u[1], r * u[2]};
  };
  auto escapes = [&](double r) { return classify_orbit(m, at(r), o.bisection_iterations).label == OrbitLabel::Escaped; };
  double lo = 0.25, hi = 2.0 * m.escape_radius;
  if (escapes(lo) || !escapes(hi)) throw Error("ray bisection lost its bracket on " + m.name);
  while (hi - lo > o.bisection_tol) {
    const double mid = 0.5 * (lo + hi);
    (escapes(mid) ? hi : lo) = mid;
  }
  return at(0.5 * (lo + hi));
}

}  // namespace detail

/// Sample points on J(f). Inverse iteration follows one random backward orbit with a
/// uniformly chosen branch per step; ray bisection splits [bounded, escaped] pairs on random rays.
inline PointCloud sample_julia(const MapDescriptor& m, int budget, SamplingMethod method, std::uint64_t seed,
                               const JuliaOptions& o = {}) {
  if (budget < 1) throw OutOfRange("budget must be positive");
  if (method == SamplingMethod::InverseIteration && m.family == Family::ZorichPower)
    throw PreconditionError("inverse iteration needs explicit planar inverse branches");
  if (method == SamplingMethod::RayBisection && m.family != Family::PlanarPower && m.family != Family::ZorichPower)
    throw PreconditionError("ray bisection needs a power family (attracting 0 and inf)");
  std::mt19937_64 g(seed);
  PointCloud c;
  c.dim = m.dim;
  c.points.reserve(static_cast<std::size_t>(budget));
  if (method == SamplingMethod::InverseIteration) {
    std::complex<double> z = std::polar(0.5 + detail::uniform01(g), 2.0 * std::numbers::pi * detail::uniform01(g));
    for (int i = 0; i < o.transient + budget; ++i) {
      const int b = static_cast<int>(g() % static_cast<std::uint64_t>(m.degree));
      z = detail::inverse_branch(m, z, b);
      if (i >= o.transient) c.points.push_back({z.real(), z.imag()});
    }
  } else {
    for (int i = 0; i < budget; ++i) {
      Vec3d u{};
      if (m.dim == 2) {
        const double a = 2.0 * std::numbers::pi * detail::uniform01(g);
        u = {std::cos(a), std::sin(a), 0.0};
      } else {
        const double z = 2.0 * detail::uniform01(g) - 1.0, a = 2.0 * std::numbers::pi * detail::uniform01(g);
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        u = {s * std::cos(a), s * std::sin(a), z};
      }
      c.points.push_back(detail::bisect_ray(m, u, o));
    }
  }
  c.set("generator", "sample_julia");
  c.set("map", m.name);
  c.set("method", to_string(method));
  c.set("budget", std::to_string(budget));
  c.set("seed", std::to_string(seed));
  if (method == SamplingMethod::InverseIteration)
    c.set("transient", std::to_string(o.transient));
  else
    c.set("bisection_tol", detail::fmt(o.bisection_tol));
  c.set("sampling_scale", detail::fmt(detail::cloud_spacing(c)));
  return c;
}

inline PointCloud sample_julia(const MapDescriptor& m, int budget, std::uint64_t seed) {
  return sample_julia(m, budget, default_method(m), seed);
}

/// A repelling (or parabolic) fixed point, which lies on J(f).
inline std::complex<double> julia_fixed_point(const MapDescriptor& m) {
  if (m.family == Family::Quadratic) return 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * m.c));
  if (m.family == Family::ZorichPower) throw PreconditionError("planar families only");
  return {1.0, 0.0};
}

/// Depth-k sample. Planar maps: every k-fold preimage of a fixed point on J(f), duplicates
/// at critical values merged, so each depth-k cylinder is represented once. Zorich maps:
/// ray bisection along 2^k Fibonacci-lattice directions under a seeded random rotation.
inline PointCloud sample_julia_depth(const MapDescriptor& m, int depth, std::uint64_t seed, const JuliaOptions& o = {}) {
  if (depth < 1) throw OutOfRange("depth must be positive");
  const double size = std::pow(static_cast<double>(m.family == Family::ZorichPower ? 2 : m.degree), depth);
  if (size > 4194304.0) throw OutOfRange("depth too large for this map");
  PointCloud c;
  c.dim = m.dim;
  if (m.family != Family::ZorichPower) {
    std::vector<std::complex<double>> level{julia_fixed_point(m)};
    for (int k = 0; k < depth; ++k) {
      std::vector<std::complex<double>> next;
      next.reserve(level.size() * static_cast<std::size_t>(m.degree));
      for (const auto& z : level)
        for (int b = 0; b < m.degree; ++b) next.push_back(detail::inverse_branch(m, z, b));
      level = std::move(next);
    }
    for (const auto& z : level) c.points.push_back({z.real(), z.imag()});
    c = deduplicate(c);
  } else {
    std::mt19937_64 g(seed);
    // Uniform random rotation from a random unit quaternion.
    const double u1 = detail::uniform01(g), u2 = 2.0 * std::numbers::pi * detail::uniform01(g),
                 u3 = 2.0 * std::numbers::pi * detail::uniform01(g);
    const double qa = std::sqrt(1.0 - u1) * std::sin(u2), qb = std::sqrt(1.0 - u1) * std::cos(u2),
                 qc = std::sqrt(u1) * std::sin(u3), qd = std::sqrt(u1) * std::cos(u3);
    const double R[3][3] = {{1 - 2 * (qc * qc + qd * qd), 2 * (qb * qc - qa * qd), 2 * (qb * qd + qa * qc)},
                            {2 * (qb * qc + qa * qd), 1 - 2 * (qb * qb + qd * qd), 2 * (qc * qd - qa * qb)},
                            {2 * (qb * qd - qa * qc), 2 * (qc * qd + qa * qb), 1 - 2 * (qb * qb + qc * qc)}};
    const int count = static_cast<int>(size);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count, s = std::sqrt(1.0 - z * z), a = golden * i;
      const Vec3d v{s * std::cos(a), s * std::sin(a), z};
      const Vec3d u{R[0][0] * v[0] + R[0][1] * v[1] + R[0][2] * v[2], R[1][0] * v[0] + R[1][1] * v[1] + R[1][2] * v[2],
                    R[2][0] * v[0] + R[2][1] * v[1] + R[2][2] * v[2]};
      c.points.push_back(detail::bisect_ray(m, u, o));
    }
  }
  c.set("generator", "sample_julia_depth");
  c.set("map", m.name);
  c.set("method", m.family == Family::ZorichPower ? "ray_bisection_lattice" : "preimage_tree");
  c.set("depth", std::to_string(depth));
  if (m.family == Family::ZorichPower) c.set("seed", std::to_string(seed));
  c.set("sampling_scale", detail::fmt(detail::cloud_spacing(c)));
  return c;
}

}  // namespace uniperf::uqr
