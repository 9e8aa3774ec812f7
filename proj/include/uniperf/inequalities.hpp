#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "uniperf/error.hpp"
#include "uniperf/modulus/capacity.hpp"

namespace uniperf {

/// Teichmuller capacity estimates at s = 2^k, interpolated linearly in (log s, log tau).
/// Nodes are solved on demand and cached.
class TauTable {
 public:
  explicit TauTable(int n = 2, modulus::TauOptions o = {}) : n_(n), opt_(o) {
    if (n != 2 && n != 3) throw OutOfRange("tau supports n = 2 and n = 3");
  }

  double operator()(double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw OutOfRange("s must be positive");
    const double t = std::log2(s);
    const int k0 = static_cast<int>(std::floor(t));
    const double a = std::log(node(k0));
    if (t == k0) return std::exp(a);
    const double b = std::log(node(k0 + 1));
    return std::exp(a + (t - k0) * (b - a));
  }

  /// Solves every node needed for s in [lo, hi] up front.
  void prepare(double lo, double hi) {
    for (int k = static_cast<int>(std::floor(std::log2(lo))); k <= static_cast<int>(std::ceil(std::log2(hi))); ++k)
      node(k);
  }

  int n() const { return n_; }
  const modulus::TauOptions& options() const { return opt_; }
  const std::map<int, double>& nodes() const { return cache_; }

 private:
  double node(int k) {
    auto it = cache_.find(k);
    if (it != cache_.end()) return it->second;
    const double v = modulus::tau_estimate({n_, std::ldexp(1.0, k)}, opt_).capacity;
    cache_.emplace(k, v);
    return v;
  }

  int n_;
  modulus::TauOptions opt_;
  std::map<int, double> cache_;
};

/// Planar continuum used as a condenser plate: a closed disc, the closed exterior of a
/// disc (containing infinity), or a polyline.
struct PlanarPlate {
  enum class Kind { Disc, Exterior, Polyline };
  Kind kind = Kind::Disc;
  std::array<double, 2> center{};
  double radius = 0.0;
  std::vector<std::array<double, 2>> vertices;

  static PlanarPlate disc(double x, double y, double r) { return {Kind::Disc, {x, y}, r, {}}; }
  static PlanarPlate exterior(double x, double y, double r) { return {Kind::Exterior, {x, y}, r, {}}; }
  static PlanarPlate polyline(std::vector<std::array<double, 2>> v) {
    if (v.size() < 2) throw PreconditionError("a polyline needs two vertices");
    return {Kind::Polyline, {}, 0.0, std::move(v)};
  }

  bool bounded() const { return kind != Kind::Exterior; }

  std::vector<modulus::RingPrimitive> primitives() const {
    using modulus::RingPrimitive;
    const modulus::Vec3 c{center[0], center[1], 0.0};
    switch (kind) {
      case Kind::Disc: return {RingPrimitive::ball(c, radius)};
      case Kind::Exterior: return {RingPrimitive::exterior(c, radius)};
      case Kind::Polyline: break;
    }
    std::vector<RingPrimitive> out;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
      out.push_back(RingPrimitive::segment({vertices[i][0], vertices[i][1], 0.0},
                                           {vertices[i + 1][0], vertices[i + 1][1], 0.0}));
    return out;
  }
};

namespace detail {

using P2 = std::array<double, 2>;
using P3 = std::array<double, 3>;

inline double dot3(const P3& a, const P3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// Stereographic lift to the unit sphere; chordal distance is half the chord.
inline P3 lift(const P2& x) {
  const double q = x[0] * x[0] + x[1] * x[1];
  return {2.0 * x[0] / (1.0 + q), 2.0 * x[1] / (1.0 + q), (q - 1.0) / (q + 1.0)};
}

/// Spherical cap {Z : N.Z >= cos(theta)} on the unit sphere.
struct Cap {
  P3 normal{};
  double theta = 0.0;
};

/// Image of a disc or disc exterior: the lifted boundary circle spans the cap's plane.
inline Cap plate_cap(const PlanarPlate& p) {
  const double r = p.radius, x = p.center[0], y = p.center[1];
  const P3 a = lift({x + r, y}), b = lift({x, y + r}), c = lift({x - r, y});
  const P3 u{b[0] - a[0], b[1] - a[1], b[2] - a[2]}, v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  P3 nrm{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  const double len = std::sqrt(dot3(nrm, nrm));
  for (auto& t : nrm) t /= len;
  double d = dot3(nrm, a);
  const P3 inside = p.kind == PlanarPlate::Kind::Disc ? lift(p.center) : P3{0.0, 0.0, 1.0};
  if (dot3(nrm, inside) < d) {
    for (auto& t : nrm) t = -t;
    d = -d;
  }
  return {nrm, std::acos(std::clamp(d, -1.0, 1.0))};
}

inline double angle(const P3& a, const P3& b) { return std::acos(std::clamp(dot3(a, b), -1.0, 1.0)); }

inline std::vector<P2> sample_polyline(const std::vector<P2>& v, int per_segment) {
  std::vector<P2> out;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    for (int j = 0; j < per_segment; ++j) {
      const double t = static_cast<double>(j) / per_segment;
      out.push_back({v[i][0] + t * (v[i + 1][0] - v[i][0]), v[i][1] + t * (v[i + 1][1] - v[i][1])});
    }
  out.push_back(v.back());
  return out;
}

inline double point_segment(const P2& p, const P2& a, const P2& b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double l2 = dx * dx + dy * dy;
  double t = l2 > 0.0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p[0] - a[0] - t * dx, p[1] - a[1] - t * dy);
}

inline bool segments_cross(const P2& a, const P2& b, const P2& c, const P2& d) {
  auto orient = [](const P2& p, const P2& q, const P2& r) {
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
  };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

inline double segment_segment(const P2& a, const P2& b, const P2& c, const P2& d) {
  if (segments_cross(a, b, c, d)) return 0.0;
  return std::min({point_segment(a, c, d), point_segment(b, c, d), point_segment(c, a, b), point_segment(d, a, b)});
}

constexpr int kChordalSamples = 400;

}  // namespace detail

/// Euclidean diameter; infinite for exteriors.
inline double euclidean_diameter(const PlanarPlate& p) {
  switch (p.kind) {
    case PlanarPlate::Kind::Disc: return 2.0 * p.radius;
    case PlanarPlate::Kind::Exterior: return std::numeric_limits<double>::infinity();
    case PlanarPlate::Kind::Polyline: break;
  }
  double d = 0.0;
  for (const auto& a : p.vertices)
    for (const auto& b : p.vertices) d = std::max(d, std::hypot(a[0] - b[0], a[1] - b[1]));
  return d;
}

/// Euclidean distance between two bounded plates.
inline double euclidean_distance(const PlanarPlate& e, const PlanarPlate& f) {
  if (!e.bounded() || !f.bounded()) throw PreconditionError("Euclidean distance needs bounded plates");
  using K = PlanarPlate::Kind;
  if (e.kind == K::Disc && f.kind == K::Disc)
    return std::max(0.0, std::hypot(e.center[0] - f.center[0], e.center[1] - f.center[1]) - e.radius - f.radius);
  if (e.kind == K::Disc || f.kind == K::Disc) {
    const auto& disc = e.kind == K::Disc ? e : f;
    const auto& line = e.kind == K::Disc ? f : e;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < line.vertices.size(); ++i)
      d = std::min(d, detail::point_segment(disc.center, line.vertices[i], line.vertices[i + 1]));
    return std::max(0.0, d - disc.radius);
  }
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < e.vertices.size(); ++i)
    for (std::size_t j = 0; j + 1 < f.vertices.size(); ++j)
      d = std::min(d, detail::segment_segment(e.vertices[i], e.vertices[i + 1], f.vertices[j], f.vertices[j + 1]));
  return d;
}

/// Chordal diameter. Exact for discs and exteriors, sampled for polylines.
inline double chordal_diameter(const PlanarPlate& p) {
  if (p.kind != PlanarPlate::Kind::Polyline) {
    const double th = detail::plate_cap(p).theta;
    return th >= 0.5 * std::numbers::pi ? 1.0 : std::sin(th);
  }
  std::vector<detail::P3> z;
  for (const auto& x : detail::sample_polyline(p.vertices, detail::kChordalSamples)) z.push_back(detail::lift(x));
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) d = std::max(d, 1.0 - detail::dot3(z[i], z[j]));
  return std::sqrt(0.5 * d);  // |Z - Z'|^2 / 4 = (1 - Z.Z') / 2
}

/// Chordal distance between plates. Exact between caps, sampled along polylines.
inline double chordal_distance(const PlanarPlate& e, const PlanarPlate& f) {
  using K = PlanarPlate::Kind;
  auto gap = [](double a) { return std::sin(0.5 * std::max(0.0, a)); };
  if (e.kind != K::Polyline && f.kind != K::Polyline) {
    const auto a = detail::plate_cap(e), b = detail::plate_cap(f);
    return gap(detail::angle(a.normal, b.normal) - a.theta - b.theta);
  }
  if (e.kind != K::Polyline || f.kind != K::Polyline) {
    const auto& capped = e.kind != K::Polyline ? e : f;
    const auto& line = e.kind != K::Polyline ? f : e;
    const auto cap = detail::plate_cap(capped);
    double d = 1.0;
    for (const auto& x : detail::sample_polyline(line.vertices, detail::kChordalSamples))
      d = std::min(d, gap(detail::angle(cap.normal, detail::lift(x)) - cap.theta));
    return d;
  }
  std::vector<detail::P3> zf;
  for (const auto& x : detail::sample_polyline(f.vertices, detail::kChordalSamples)) zf.push_back(detail::lift(x));
  double best = 1.0;
  for (const auto& x : detail::sample_polyline(e.vertices, detail::kChordalSamples)) {
    const auto z = detail::lift(x);
    for (const auto& w : zf) best = std::min(best, std::sqrt(std::max(0.0, 0.5 * (1.0 - detail::dot3(z, w)))));
  }
  return best;
}

struct InequalityCase {
  PlanarPlate e, f;
  double capacity = 0.0;  // discrete capacity of the condenser (E, F)
  double tau_argument = 0.0;
  double tau = 0.0;
  double bound = 0.0;  // slack * 2^(1-n) * tau
  bool holds = false;
};

struct InequalitySuite {
  std::string name;
  std::vector<InequalityCase> cases;
  std::size_t violations = 0;
  double min_ratio = std::numeric_limits<double>::infinity();  // capacity / bound
};

inline modulus::SolveOptions suite_solve_options() {
  modulus::SolveOptions o;
  o.max_paths_per_round = 256;
  return o;
}

struct InequalityOptions {
  int cases = 50;
  std::uint64_t seed = 1;
  double slack = 0.9;
  int resolution = 64;
  modulus::SolveOptions solve = suite_solve_options();
};

namespace detail {

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline PlanarPlate random_bounded_plate(std::mt19937_64& g, double box) {
  if (uniform(g, 0.0, 1.0) < 0.5)
    return PlanarPlate::disc(uniform(g, -box, box), uniform(g, -box, box), uniform(g, 0.1, 0.5));
  return PlanarPlate::polyline({{uniform(g, -box, box), uniform(g, -box, box)},
                                {uniform(g, -box, box), uniform(g, -box, box)}});
}

inline PlanarPlate random_polyline(std::mt19937_64& g, double box) {
  const int m = 2 + static_cast<int>(uniform(g, 0.0, 3.0));
  std::vector<P2> v{{uniform(g, -box, box), uniform(g, -box, box)}};
  for (int i = 1; i < m; ++i) {
    const double len = std::pow(10.0, uniform(g, -0.7, 0.0));
    const double a = uniform(g, 0.0, 2.0 * std::numbers::pi);
    v.push_back({v.back()[0] + len * std::cos(a), v.back()[1] + len * std::sin(a)});
  }
  return PlanarPlate::polyline(std::move(v));
}

/// Smallest Euclidean gap between two plates, with the exterior handled as a disc complement.
inline double plate_gap(const PlanarPlate& e, const PlanarPlate& f) {
  if (e.bounded() && f.bounded()) return euclidean_distance(e, f);
  const auto& ext = e.bounded() ? f : e;
  const auto& in = e.bounded() ? e : f;
  double far = 0.0;
  if (in.kind == PlanarPlate::Kind::Disc) {
    far = std::hypot(in.center[0] - ext.center[0], in.center[1] - ext.center[1]) + in.radius;
  } else {
    for (const auto& v : in.vertices) far = std::max(far, std::hypot(v[0] - ext.center[0], v[1] - ext.center[1]));
  }
  return ext.radius - far;
}

inline double plate_size(const PlanarPlate& p) {
  return p.kind == PlanarPlate::Kind::Disc ? 2.0 * p.radius : euclidean_diameter(p);
}

inline modulus::CapacityResult plate_capacity(const PlanarPlate& e, const PlanarPlate& f,
                                              const InequalityOptions& o) {
  modulus::RingOptions ro;
  ro.n = 2;
  ro.resolution = o.resolution;
  ro.solve = o.solve;
  return modulus::ring_capacity(e.primitives(), f.primitives(), ro);
}

inline void finish(InequalitySuite& s, TauTable& tau, double slack) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& c : s.cases) {
    lo = std::min(lo, c.tau_argument);
    hi = std::max(hi, c.tau_argument);
  }
  if (!s.cases.empty()) tau.prepare(lo, hi);
  for (auto& c : s.cases) {
    c.tau = tau(c.tau_argument);
    c.bound = slack * std::pow(2.0, 1.0 - tau.n()) * c.tau;
    c.holds = c.capacity >= c.bound;
    if (!c.holds) ++s.violations;
    s.min_ratio = std::min(s.min_ratio, c.capacity / c.bound);
  }
}

}  // namespace detail

/// Random rings in the Riemann sphere bounded by two plates E, F (discs, segments, disc
/// exteriors), checked against capac >= slack 2^(1-n) tau_n(2 chi(E, F) / min(chi(E), chi(F))).
inline InequalitySuite sphere_ring_suite(TauTable& tau, const InequalityOptions& o = {}) {
  if (tau.n() != 2) throw PreconditionError("the plate generators are planar");
  std::mt19937_64 g(o.seed);
  InequalitySuite s;
  s.name = "sphere_ring";
  constexpr double kMinGap = 0.3, kMinSize = 0.3;
  while (static_cast<int>(s.cases.size()) < o.cases) {
    InequalityCase c;
    c.e = detail::random_bounded_plate(g, 1.0);
    if (detail::uniform(g, 0.0, 1.0) < 0.3)
      c.f = PlanarPlate::exterior(detail::uniform(g, -0.5, 0.5), detail::uniform(g, -0.5, 0.5), detail::uniform(g, 1.5, 3.0));
    else
      c.f = detail::random_bounded_plate(g, 1.0);
    if (detail::plate_size(c.e) < kMinSize || (c.f.bounded() && detail::plate_size(c.f) < kMinSize)) continue;
    if (detail::plate_gap(c.e, c.f) < kMinGap) continue;
    c.tau_argument = 2.0 * chordal_distance(c.e, c.f) / std::min(chordal_diameter(c.e), chordal_diameter(c.f));
    c.capacity = detail::plate_capacity(c.e, c.f, o).capacity;
    s.cases.push_back(std::move(c));
  }
  detail::finish(s, tau, o.slack);
  return s;
}

/// Random disjoint polylines E, F in the plane with d(E) <= d(F), checked against
/// M(Delta(E, F)) >= slack 2^(1-n) tau_n(d(E, F) / d(E)).
inline InequalitySuite planar_continua_suite(TauTable& tau, const InequalityOptions& o = {}) {
  if (tau.n() != 2) throw PreconditionError("the plate generators are planar");
  std::mt19937_64 g(o.seed);
  InequalitySuite s;
  s.name = "planar_continua";
  constexpr double kMinGap = 0.3, kMinSize = 0.3;
  while (static_cast<int>(s.cases.size()) < o.cases) {
    InequalityCase c;
    c.e = detail::random_polyline(g, 1.0);
    c.f = detail::random_polyline(g, 1.0);
    if (euclidean_diameter(c.e) > euclidean_diameter(c.f)) std::swap(c.e, c.f);
    const double de = euclidean_diameter(c.e), gap = euclidean_distance(c.e, c.f);
    if (de < kMinSize || gap < kMinGap) continue;
    c.tau_argument = gap / de;
    c.capacity = detail::plate_capacity(c.e, c.f, o).capacity;
    s.cases.push_back(std::move(c));
  }
  detail::finish(s, tau, o.slack);
  return s;
}

}  // namespace uniperf
