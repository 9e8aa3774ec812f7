#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>

#include "uniperf/error.hpp"
#include "uniperf/point.hpp"

namespace uniperf {

enum class Metric { Euclidean, Chordal };

inline const char* to_string(Metric m) {
  return m == Metric::Euclidean ? "euclidean" : "chordal";
}

/// Chordal distance on R^n u {inf}, normalised so antipodal points sit at distance 1.
inline double chordal_distance(const ExtendedPoint& x, const ExtendedPoint& y) {
  require_same_dim(x, y);
  if (x.is_infinite() && y.is_infinite()) return 0.0;
  if (x.is_infinite()) return 1.0 / std::sqrt(1.0 + y.norm2());
  if (y.is_infinite()) return 1.0 / std::sqrt(1.0 + x.norm2());
  double d2 = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    const double t = x[i] - y[i];
    d2 += t * t;
  }
  const double v = std::sqrt(d2) / (std::sqrt(1.0 + x.norm2()) * std::sqrt(1.0 + y.norm2()));
  return std::min(v, 1.0);
}

inline double distance(Metric m, const ExtendedPoint& x, const ExtendedPoint& y) {
  return m == Metric::Euclidean ? euclidean_distance(x, y) : chordal_distance(x, y);
}

/// Open round annulus {y : inner < d(center, y) < outer}.
struct RoundRing {
  ExtendedPoint center;
  double inner = 0.0;
  double outer = 0.0;
  Metric metric = Metric::Euclidean;

  RoundRing() = default;
  RoundRing(ExtendedPoint c, double u, double w, Metric m = Metric::Euclidean)
      : center(c), inner(u), outer(w), metric(m) {}

  bool contains(const ExtendedPoint& y) const {
    const double d = distance(metric, center, y);
    return d > inner && d < outer;
  }
  /// True when y lies in the bounded complementary component.
  bool inside(const ExtendedPoint& y) const { return distance(metric, center, y) <= inner; }
};

inline void validate_ring_shape(const RoundRing& r) {
  if (r.center.is_infinite()) throw PreconditionError("ring center must be finite");
  if (!(r.inner > 0.0) || !std::isfinite(r.outer))
    throw OutOfRange("ring radii must be positive and finite");
  if (r.inner >= r.outer)
    throw DegenerateRing("inner radius " + std::to_string(r.inner) +
                         " is not below outer radius " + std::to_string(r.outer));
}

inline double euclidean_ring_modulus(double u, double w) {
  if (!(u > 0.0) || !std::isfinite(w)) throw OutOfRange("ring radii must be positive and finite");
  if (u >= w) throw DegenerateRing("degenerate ring: inner >= outer");
  return std::log(w / u);
}

inline double chordal_ring_modulus(double u, double w) {
  if (!(u > 0.0)) throw OutOfRange("ring radii must be positive");
  if (w >= 1.0) throw OutOfRange("chordal ring outer radius must be below 1");
  if (u >= w) throw DegenerateRing("degenerate ring: inner >= outer");
  return std::log((w / u) * std::sqrt((1.0 - u * u) / (1.0 - w * w)));
}

inline double euclidean_ring_modulus(const RoundRing& r) {
  if (r.metric != Metric::Euclidean) throw PreconditionError("expected a Euclidean ring");
  validate_ring_shape(r);
  return euclidean_ring_modulus(r.inner, r.outer);
}

inline double chordal_ring_modulus(const RoundRing& r) {
  if (r.metric != Metric::Chordal) throw PreconditionError("expected a chordal ring");
  validate_ring_shape(r);
  return chordal_ring_modulus(r.inner, r.outer);
}

inline double ring_modulus(const RoundRing& r) {
  return r.metric == Metric::Euclidean ? euclidean_ring_modulus(r) : chordal_ring_modulus(r);
}

/// Checks the containment `inner` within `outer` for concentric rings of one metric.
inline bool modulus_monotonicity_check(const RoundRing& inner, const RoundRing& outer) {
  if (inner.metric != outer.metric) throw PreconditionError("rings use different metrics");
  validate_ring_shape(inner);
  validate_ring_shape(outer);
  if (!(inner.center == outer.center))
    throw PreconditionError("nesting is only verified for concentric rings");
  if (inner.inner < outer.inner || inner.outer > outer.outer)
    throw PreconditionError("rings are not nested");
  return ring_modulus(inner) <= ring_modulus(outer);
}

/// Inversion in the unit sphere centred at `pole`; an involution of R^n u {inf}.
struct MoebiusInversion {
  ExtendedPoint pole;

  explicit MoebiusInversion(ExtendedPoint p) : pole(p) {
    if (p.is_infinite()) throw PreconditionError("inversion pole must be finite");
  }

  ExtendedPoint operator()(const ExtendedPoint& y) const {
    require_same_dim(pole, y);
    if (y.is_infinite()) return pole;
    double d2 = 0.0;
    std::array<double, ExtendedPoint::kMaxDim> v{};
    for (int i = 0; i < y.dim(); ++i) {
      v[i] = y[i] - pole[i];
      d2 += v[i] * v[i];
    }
    if (d2 == 0.0) return ExtendedPoint::infinity(y.dim());
    for (int i = 0; i < y.dim(); ++i) v[i] = pole[i] + v[i] / d2;
    return ExtendedPoint(std::span<const double>(v.data(), static_cast<std::size_t>(y.dim())));
  }
};

inline ExtendedPoint invert(const MoebiusInversion& g, const ExtendedPoint& y) { return g(y); }

/// Rotation of the sphere, read through stereographic projection, that takes `x` to 0.
/// It preserves the chordal metric.
class ChordalRecentering {
 public:
  explicit ChordalRecentering(const ExtendedPoint& x) : n_(x.dim()) {
    if (x.is_infinite()) throw PreconditionError("recentering needs a finite point");
    u_ = lift(x);
    v_ = {};
    v_[static_cast<std::size_t>(n_)] = -1.0;
  }

  ExtendedPoint operator()(const ExtendedPoint& y) const {
    require_same_dim(ExtendedPoint::origin(n_), y);
    const auto z = lift(y);
    double uz = 0.0, wz = 0.0, uv = 0.0;
    for (int i = 0; i <= n_; ++i) {
      uz += u_[i] * z[i];
      wz += (u_[i] + v_[i]) * z[i];
      uv += u_[i] * v_[i];
    }
    Lifted r{};
    for (int i = 0; i <= n_; ++i) r[i] = z[i] - (u_[i] + v_[i]) * wz / (1.0 + uv) + 2.0 * v_[i] * uz;
    return drop(r);
  }

 private:
  using Lifted = std::array<double, ExtendedPoint::kMaxDim + 1>;

  Lifted lift(const ExtendedPoint& y) const {
    Lifted z{};
    if (y.is_infinite()) {
      z[static_cast<std::size_t>(n_)] = 1.0;
      return z;
    }
    const double q = y.norm2();
    for (int i = 0; i < n_; ++i) z[i] = 2.0 * y[i] / (q + 1.0);
    z[static_cast<std::size_t>(n_)] = (q - 1.0) / (q + 1.0);
    return z;
  }

  ExtendedPoint drop(const Lifted& z) const {
    const double den = 1.0 - z[static_cast<std::size_t>(n_)];
    if (den <= 1e-300) return ExtendedPoint::infinity(n_);
    std::array<double, ExtendedPoint::kMaxDim> c{};
    for (int i = 0; i < n_; ++i) c[i] = z[i] / den;
    return ExtendedPoint(std::span<const double>(c.data(), static_cast<std::size_t>(n_)));
  }

  int n_;
  Lifted u_{}, v_{};
};

/// Euclidean radius of the chordal ball B_chi(0, r) for r < 1.
inline double chordal_to_euclidean_radius(double r) {
  if (!(r > 0.0 && r < 1.0)) throw OutOfRange("chordal radius must lie in (0, 1)");
  return r / std::sqrt(1.0 - r * r);
}

/// Surface area of the unit (n-1)-sphere in R^n.
inline double sphere_surface_area(int n) {
  using std::numbers::pi;
  switch (n) {
    case 2: return 2.0 * pi;
    case 3: return 4.0 * pi;
    case 4: return 2.0 * pi * pi;
    default: throw OutOfRange("sphere_surface_area supports n in {2,3,4}");
  }
}

inline double capacity_to_modulus(double capacity, int n) {
  if (!(capacity > 0.0)) return std::numeric_limits<double>::infinity();
  return std::pow(capacity / sphere_surface_area(n), 1.0 / (1.0 - n));
}

inline double modulus_to_capacity(double modulus, int n) {
  return sphere_surface_area(n) * std::pow(modulus, 1.0 - n);
}

}  // namespace uniperf
