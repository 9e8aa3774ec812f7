#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include "uniperf/error.hpp"
#include "uniperf/modulus/solver.hpp"
#include "uniperf/point.hpp"
#include "uniperf/sphere_geometry.hpp"

namespace uniperf::modulus {

/// Geometric piece of a ring complement.
struct RingPrimitive {
  enum class Kind { Ball, Exterior, Sphere, Segment, Cloud };
  Kind kind = Kind::Ball;
  Vec3 a{};  // centre, or first segment end
  Vec3 b{};  // second segment end
  double radius = 0.0;
  std::vector<Vec3> points;

  static RingPrimitive ball(Vec3 c, double r) { return {Kind::Ball, c, {}, r, {}}; }
  /// {x : |x - c| >= r}, the unbounded component.
  static RingPrimitive exterior(Vec3 c, double r) { return {Kind::Exterior, c, {}, r, {}}; }
  static RingPrimitive sphere(Vec3 c, double r) { return {Kind::Sphere, c, {}, r, {}}; }
  static RingPrimitive segment(Vec3 p, Vec3 q) { return {Kind::Segment, p, q, 0.0, {}}; }
  static RingPrimitive cloud(std::vector<Vec3> pts, double r) {
    return {Kind::Cloud, {}, {}, r, std::move(pts)};
  }

  std::shared_ptr<const Shape> shape(int dim) const {
    switch (kind) {
      case Kind::Ball: return std::make_shared<BallShape>(a, radius, dim);
      case Kind::Exterior: return std::make_shared<BallComplementShape>(a, radius, dim);
      case Kind::Sphere: return std::make_shared<SphereShape>(a, radius, dim);
      case Kind::Segment: return std::make_shared<PolylineShape>(std::vector<Vec3>{a, b}, dim);
      case Kind::Cloud: return std::make_shared<DilatedPointsShape>(points, radius, dim);
    }
    throw PreconditionError("unknown primitive");
  }

  /// Axis-aligned box holding the primitive (the bounding sphere for exteriors).
  void extend(int dim, Vec3& lo, Vec3& hi) const {
    auto grow = [&](const Vec3& p, double r) {
      for (int k = 0; k < dim; ++k) {
        lo[k] = std::min(lo[k], p[k] - r);
        hi[k] = std::max(hi[k], p[k] + r);
      }
    };
    switch (kind) {
      case Kind::Segment: grow(a, 0.0); grow(b, 0.0); break;
      case Kind::Cloud:
        for (const auto& p : points) grow(p, radius);
        break;
      default: grow(a, radius);
    }
  }

  /// Smallest length the grid has to resolve, infinite when nothing constrains it.
  double feature() const {
    if ((kind == Kind::Ball || kind == Kind::Cloud) && radius > 0.0) return radius;
    return std::numeric_limits<double>::infinity();
  }
};

struct RingOptions {
  int n = 2;
  int resolution = 0;       // cells across the box; 0 picks 256 for n = 2 and 96 for n = 3
  double half_width = 0.0;  // 0 lets the resolution policy choose
  SolveOptions solve{};
};

inline int default_resolution(int n) { return n == 2 ? 256 : 96; }

/// Grid for a ring given by its two complementary pieces. The box is centred on the
/// primitives and its half-width is res * feature / 4 clamped to [2, 3] times their extent,
/// so the thinnest solid piece spans a few cells whenever the budget allows.
inline GridCondenser ring_condenser(const std::vector<RingPrimitive>& E,
                                    const std::vector<RingPrimitive>& F, const RingOptions& o) {
  if (o.n != 2 && o.n != 3) throw OutOfRange("ring capacity supports n = 2 and n = 3");
  if (E.empty() || F.empty()) throw PreconditionError("both ring components need a primitive");
  const int res = o.resolution > 0 ? o.resolution : default_resolution(o.n);
  Vec3 lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  double feature = std::numeric_limits<double>::infinity();
  for (const auto* side : {&E, &F})
    for (const auto& p : *side) {
      p.extend(o.n, lo, hi);
      feature = std::min(feature, p.feature());
    }
  Vec3 c{};
  double ext = 0.0;
  for (int k = 0; k < o.n; ++k) {
    c[k] = 0.5 * (lo[k] + hi[k]);
    ext = std::max(ext, 0.5 * (hi[k] - lo[k]));
  }
  if (!(ext > 0.0)) throw PreconditionError("ring components have no extent");
  double hw = o.half_width;
  if (hw <= 0.0) hw = std::clamp(res * feature / 4.0, 2.0 * ext, 3.0 * ext);

  GridCondenser g;
  Vec3 blo{}, bhi{};
  for (int k = 0; k < o.n; ++k) {
    blo[k] = c[k] - hw;
    bhi[k] = c[k] + hw;
  }
  g.lattice = cartesian_lattice(o.n, blo, bhi, res);
  for (const auto& p : E) g.plate_e.add(p.shape(o.n));
  for (const auto& p : F) g.plate_f.add(p.shape(o.n));
  return g;
}

inline CapacityResult ring_capacity(const std::vector<RingPrimitive>& E,
                                    const std::vector<RingPrimitive>& F,
                                    const RingOptions& o = {}) {
  return solve_modulus(ring_condenser(E, F, o), o.solve).first;
}

// ---------------------------------------------------------------------------
// Teichmueller ring with complementary components [-e1, 0] and [s e1, inf].

struct TeichmullerQuery {
  int n = 2;
  double s = 1.0;
};

struct TauOptions {
  int resolution = 32;      // cells across the angular range [0, pi]
  double box_scale = 100.0;  // truncation radius in units of max(1, s)
  SolveOptions solve{};
};

/// The ring is symmetric about the line through both components, so it is solved on the
/// half-plane (n = 2, log-polar) or on a meridian half-plane (n = 3, axisymmetric
/// log-spherical) with the axis as a reflecting side. The small disc around 0 is added to
/// the first component and the far exterior to the second.
inline GridCondenser tau_condenser(const TeichmullerQuery& q, const TauOptions& o) {
  if (!(q.s > 0.0) || !std::isfinite(q.s)) throw OutOfRange("s must be positive");
  if (q.n != 2 && q.n != 3) throw OutOfRange("tau supports n = 2 and n = 3");
  if (o.resolution < 8) throw OutOfRange("tau resolution must be at least 8");
  if (!(o.box_scale >= 20.0)) throw OutOfRange("box_scale must be at least 20");
  const double pi = std::numbers::pi;
  const double xi_lo = std::log(std::min(1.0, q.s)) - std::log(o.box_scale);
  const double xi_hi = std::log(std::max(1.0, q.s)) + std::log(o.box_scale);

  GridCondenser g;
  Lattice& L = g.lattice;
  L.dim = 2;
  L.n = q.n;
  L.chart = q.n == 2 ? Chart::LogPolar : Chart::AxisymmetricLogSpherical;
  L.h = pi / o.resolution;
  L.size = {static_cast<int>(std::ceil((xi_hi - xi_lo) / L.h)) + 1, o.resolution + 1, 1};
  L.origin = {xi_lo, 0.0, 0.0};
  g.plate_e.with<HalfLineShape>(Vec3{0.0, pi, 0.0}, 0, -1, 2).with<HalfSpaceShape>(0, xi_lo, -1);
  g.plate_f.with<HalfLineShape>(Vec3{std::log(q.s), 0.0, 0.0}, 0, 1, 2)
      .with<HalfSpaceShape>(0, xi_lo + L.h * (L.size[0] - 1), 1);
  return g;
}

/// Factor from the symmetric half to the whole ring.
inline double tau_symmetry_factor(int n) { return n == 2 ? 2.0 : 1.0; }

inline CapacityResult tau_estimate(const TeichmullerQuery& q, const TauOptions& o = {}) {
  auto r = solve_modulus(tau_condenser(q, o), o.solve).first;
  const double f = tau_symmetry_factor(q.n);
  r.capacity *= f;
  r.lower_bound *= f;
  r.modulus = capacity_to_modulus(r.capacity, q.n);
  return r;
}

struct TauConvergence {
  std::vector<int> resolutions;
  std::vector<double> values;
  double order = std::numeric_limits<double>::quiet_NaN();
  double extrapolated = std::numeric_limits<double>::quiet_NaN();
};

/// Richardson extrapolation from three resolutions in ratio 2 (the last three are used).
inline TauConvergence tau_convergence(const TeichmullerQuery& q, std::vector<int> resolutions,
                                      TauOptions o = {}) {
  if (resolutions.size() < 3) throw PreconditionError("convergence study needs three resolutions");
  TauConvergence out;
  for (int r : resolutions) {
    o.resolution = r;
    out.resolutions.push_back(r);
    out.values.push_back(tau_estimate(q, o).capacity);
  }
  const std::size_t k = out.values.size();
  const double a = out.values[k - 3], b = out.values[k - 2], c = out.values[k - 1];
  const double d1 = a - b, d2 = b - c;
  if (d1 != 0.0 && d2 != 0.0 && d1 / d2 > 1.0) {
    out.order = std::log2(d1 / d2);
    out.extrapolated = c - d2 / (d1 / d2 - 1.0);
  } else {
    out.extrapolated = c;
  }
  return out;
}

/// Relative change of the estimate when the truncation radius doubles.
inline double tau_box_sensitivity(const TeichmullerQuery& q, const TauOptions& o = {}) {
  TauOptions big = o;
  big.box_scale = 2.0 * o.box_scale;
  const double a = tau_estimate(q, o).capacity;
  const double b = tau_estimate(q, big).capacity;
  return std::abs(b - a) / a;
}

// ---------------------------------------------------------------------------
// Condensers around points of a cloud.

struct CondenserOptions {
  int resolution = 0;  // cells across the box; 0 picks 128 for n = 2 and 64 for n = 3
  SolveOptions solve{};
};

namespace detail {

/// Capacity of the condenser (B(0, outer), points dilated by one cell) in R^n; the points
/// are already restricted to the closed inner ball.
inline CapacityResult point_condenser(int n, const std::vector<Vec3>& pts, double outer,
                                      const CondenserOptions& o) {
  CapacityResult zero;
  zero.n = n;
  zero.p = o.solve.p > 0.0 ? o.solve.p : n;
  zero.connected = false;
  if (pts.empty()) return zero;
  bool single = true;
  for (const auto& p : pts)
    for (int k = 0; k < n; ++k) single &= std::abs(p[k] - pts[0][k]) <= 1e-12 * outer;
  if (single) return zero;  // a point carries no n-capacity

  const int res = o.resolution > 0 ? o.resolution : (n == 2 ? 128 : 64);
  const double hw = 1.05 * outer;
  GridCondenser g;
  g.lattice = cartesian_lattice(n, Vec3{-hw, -hw, -hw}, Vec3{hw, hw, hw}, res);
  g.plate_e.with<DilatedPointsShape>(pts, g.lattice.h, n);
  g.plate_f.with<BallComplementShape>(Vec3{}, outer, n);
  return solve_modulus(g, o.solve).first;
}

inline Vec3 to_vec(const ExtendedPoint& p) {
  Vec3 v{};
  for (int k = 0; k < p.dim(); ++k) v[k] = p[k];
  return v;
}

}  // namespace detail

/// capac(B(x, 2r), closed r-ball around x intersected with E).
inline CapacityResult condenser_capacity(const ExtendedPoint& x, const std::vector<ExtendedPoint>& E,
                                         double r, const CondenserOptions& o = {}) {
  if (!(r > 0.0)) throw OutOfRange("condenser radius must be positive");
  if (x.is_infinite()) throw PreconditionError("condenser centre must be finite");
  const int n = x.dim();
  if (n != 2 && n != 3) throw OutOfRange("condenser capacity supports n = 2 and n = 3");
  std::vector<Vec3> pts;
  for (const auto& e : E) {
    require_same_dim(x, e);
    if (e.is_infinite()) continue;
    Vec3 d{};
    double d2 = 0.0;
    for (int k = 0; k < n; ++k) {
      d[k] = e[k] - x[k];
      d2 += d[k] * d[k];
    }
    if (d2 <= r * r) pts.push_back(d);
  }
  return detail::point_condenser(n, pts, 2.0 * r, o);
}

/// m_t(E, r, x): modulus of the curves joining the chordal sphere of radius t about x to
/// the part of E in the closed chordal r-ball. x is first moved to 0 by a chordal isometry.
inline CapacityResult thickness(const std::vector<ExtendedPoint>& E, const ExtendedPoint& x, double r,
                                double t, const CondenserOptions& o = {}) {
  if (!(r > 0.0) || !(t < 1.0)) throw OutOfRange("thickness needs 0 < r < t < 1");
  if (r >= t) throw OutOfRange("thickness needs r < t");
  const int n = x.dim();
  if (n != 2 && n != 3) throw OutOfRange("thickness supports n = 2 and n = 3");
  const ChordalRecentering A(x);
  const double inner = chordal_to_euclidean_radius(r);
  std::vector<Vec3> pts;
  for (const auto& e : E) {
    const ExtendedPoint y = A(e);
    if (y.is_infinite() || y.norm() > inner) continue;
    pts.push_back(detail::to_vec(y));
  }
  return detail::point_condenser(n, pts, chordal_to_euclidean_radius(t), o);
}

}  // namespace uniperf::modulus
