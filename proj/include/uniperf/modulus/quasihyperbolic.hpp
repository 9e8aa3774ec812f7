#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "uniperf/error.hpp"
#include "uniperf/kdtree.hpp"
#include "uniperf/modulus/lattice.hpp"
#include "uniperf/point.hpp"

namespace uniperf::modulus {

/// Domain G for the quasihyperbolic metric: a ball, a half-space, or a box with a finite
/// obstacle set removed.
class QhDomain {
 public:
  static QhDomain ball(Vec3 c, double r, int dim) {
    if (!(r > 0.0)) throw OutOfRange("ball radius must be positive");
    QhDomain d(Kind::Ball, dim);
    d.c_ = c;
    d.r_ = r;
    return d;
  }
  /// {x : x[axis] > value}.
  static QhDomain half_space(int axis, double value, int dim) {
    if (axis < 0 || axis >= dim) throw OutOfRange("half-space axis out of range");
    QhDomain d(Kind::HalfSpace, dim);
    d.axis_ = axis;
    d.c_[static_cast<std::size_t>(axis)] = value;
    return d;
  }
  static QhDomain box_minus_cloud(Vec3 lo, Vec3 hi, const std::vector<Vec3>& obstacles, int dim) {
    QhDomain d(Kind::BoxMinusCloud, dim);
    d.lo_ = lo;
    d.hi_ = hi;
    for (int k = 0; k < dim; ++k)
      if (!(hi[k] > lo[k])) throw OutOfRange("empty box");
    if (!obstacles.empty()) {
      std::vector<double> flat;
      for (const auto& p : obstacles)
        for (int k = 0; k < dim; ++k) flat.push_back(p[k]);
      d.tree_ = KdTree(std::move(flat), dim);
      d.has_cloud_ = true;
    }
    return d;
  }

  int dim() const { return dim_; }

  /// d(x, boundary of G); negative outside G.
  double boundary_distance(const Vec3& x) const {
    switch (kind_) {
      case Kind::Ball: {
        double s = 0.0;
        for (int k = 0; k < dim_; ++k) s += (x[k] - c_[k]) * (x[k] - c_[k]);
        return r_ - std::sqrt(s);
      }
      case Kind::HalfSpace: return x[axis_] - c_[axis_];
      case Kind::BoxMinusCloud: {
        double d = std::numeric_limits<double>::infinity();
        for (int k = 0; k < dim_; ++k) d = std::min({d, x[k] - lo_[k], hi_[k] - x[k]});
        if (has_cloud_) d = std::min(d, std::sqrt(tree_.nearest(x.data()).dist2));
        return d;
      }
    }
    return 0.0;
  }

  /// Box on which the grid is laid out for a query between a and b.
  void grid_box(const Vec3& a, const Vec3& b, Vec3& lo, Vec3& hi) const {
    switch (kind_) {
      case Kind::Ball:
        for (int k = 0; k < dim_; ++k) {
          lo[k] = c_[k] - r_;
          hi[k] = c_[k] + r_;
        }
        return;
      case Kind::BoxMinusCloud:
        lo = lo_;
        hi = hi_;
        return;
      case Kind::HalfSpace: {
        double sep = 0.0;
        for (int k = 0; k < dim_; ++k) sep += (a[k] - b[k]) * (a[k] - b[k]);
        const double margin = std::sqrt(sep) + std::max(boundary_distance(a), boundary_distance(b));
        for (int k = 0; k < dim_; ++k) {
          lo[k] = std::min(a[k], b[k]) - margin;
          hi[k] = std::max(a[k], b[k]) + margin;
        }
        lo[axis_] = c_[axis_];
        return;
      }
    }
  }

 private:
  enum class Kind { Ball, HalfSpace, BoxMinusCloud };
  QhDomain(Kind k, int dim) : kind_(k), dim_(dim) {
    if (dim != 2 && dim != 3) throw OutOfRange("quasihyperbolic distance supports n = 2 and n = 3");
  }

  Kind kind_;
  int dim_;
  Vec3 c_{}, lo_{}, hi_{};
  double r_ = 0.0;
  int axis_ = 0;
  KdTree tree_;
  bool has_cloud_ = false;
};

struct QhOptions {
  int resolution = 0;  // cells along the longest side; 0 picks 256 for n = 2 and 64 for n = 3
  int stencil_radius = 0;
};

/// Quasihyperbolic distance k_G(a, b) as a shortest path on a lattice with edge weight
/// length * mean of 1/d(., boundary) at the ends. a and b join nearby nodes by straight
/// segments integrated by Simpson's rule.
inline double quasihyperbolic_distance(const QhDomain& G, const ExtendedPoint& a, const ExtendedPoint& b,
                                       const QhOptions& o = {}) {
  const int n = G.dim();
  if (a.dim() != n || b.dim() != n) throw DimensionMismatch("points and domain differ in dimension");
  if (a.is_infinite() || b.is_infinite()) throw PreconditionError("points must be finite");
  Vec3 pa{}, pb{};
  for (int k = 0; k < n; ++k) {
    pa[k] = a[k];
    pb[k] = b[k];
  }
  if (a == b) {
    if (!(G.boundary_distance(pa) > 0.0)) throw PreconditionError("point lies outside the domain");
    return 0.0;
  }
  Vec3 lo{}, hi{};
  G.grid_box(pa, pb, lo, hi);
  const int res = o.resolution > 0 ? o.resolution : (n == 2 ? 256 : 64);
  const Lattice L = cartesian_lattice(n, lo, hi, res);
  const double h = L.h;
  for (const auto* p : {&pa, &pb})
    if (!(G.boundary_distance(*p) > h)) throw PreconditionError("point outside the domain or within one cell of its boundary");

  const int R = o.stencil_radius > 0 ? o.stencil_radius : (n == 2 ? 3 : 2);
  const auto stencil = make_stencil(n, R);
  const std::size_t N = L.node_count();
  std::vector<double> inv(N, 0.0);  // 1/d at usable nodes, 0 elsewhere
  for (std::size_t v = 0; v < N; ++v) {
    const double d = G.boundary_distance(L.coords(v));
    if (d > 0.5 * h) inv[v] = 1.0 / d;
  }

  auto segment = [&](const Vec3& x, const Vec3& y) {
    const int m = 16;
    double len2 = 0.0;
    for (int k = 0; k < n; ++k) len2 += (y[k] - x[k]) * (y[k] - x[k]);
    double acc = 0.0;
    for (int i = 0; i <= m; ++i) {
      Vec3 z{};
      for (int k = 0; k < n; ++k) z[k] = x[k] + (y[k] - x[k]) * i / m;
      const double d = G.boundary_distance(z);
      if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
      acc += (i == 0 || i == m ? 1.0 : (i % 2 ? 4.0 : 2.0)) / d;
    }
    return std::sqrt(len2) * acc / (3.0 * m);
  };
  auto nearby = [&](const Vec3& x, auto&& fn) {
    const double reach = (R + 0.5) * h;
    std::array<int, 3> l{}, u{};
    for (int k = 0; k < n; ++k) {
      l[k] = std::max(0, static_cast<int>(std::floor((x[k] - reach - L.origin[k]) / h)));
      u[k] = std::min(L.size[k] - 1, static_cast<int>(std::ceil((x[k] + reach - L.origin[k]) / h)));
    }
    for (int k3 = l[2]; k3 <= u[2]; ++k3)
      for (int j = l[1]; j <= u[1]; ++j)
        for (int i = l[0]; i <= u[0]; ++i) {
          const std::size_t v = L.index(i, j, k3);
          if (inv[v] > 0.0) fn(v);
        }
  };

  std::vector<double> dist(N, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  nearby(pa, [&](std::size_t v) {
    const double c = segment(pa, L.coords(v));
    if (c < dist[v]) {
      dist[v] = c;
      pq.push({c, v});
    }
  });
  std::vector<double> exit_cost(N, -1.0);
  nearby(pb, [&](std::size_t v) { exit_cost[v] = segment(L.coords(v), pb); });
  double best = segment(pa, pb);

  while (!pq.empty()) {
    const auto [dv, v] = pq.top();
    pq.pop();
    if (dv > dist[v] || dv >= best) continue;
    if (exit_cost[v] >= 0.0) best = std::min(best, dv + exit_cost[v]);
    const auto ijk = L.unpack(v);
    for (const auto& s : stencil) {
      std::size_t u;
      if (!L.shift(ijk, s.offset, u) || inv[u] == 0.0) continue;
      const double nd = dv + s.length * h * 0.5 * (inv[v] + inv[u]);
      if (nd < dist[u]) {
        dist[u] = nd;
        pq.push({nd, u});
      }
    }
  }
  if (!std::isfinite(best)) throw PreconditionError("points are not joined inside the domain");
  return best;
}

}  // namespace uniperf::modulus
