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
#include "uniperf/point_cloud.hpp"

namespace uniperf {

namespace detail {

using BoxKey = std::array<std::int64_t, ExtendedPoint::kMaxDim>;

inline BoxKey box_key(const ExtendedPoint& p, int dim, double eps) {
  BoxKey k{};
  for (int i = 0; i < dim; ++i) k[i] = static_cast<std::int64_t>(std::floor(p[i] / eps));
  return k;
}

/// Largest finite nearest-neighbour distance, or the generator's value when recorded.
inline double resolution(const PointCloud& c) {
  const double s = c.sampling_scale();
  if (std::isfinite(s)) return s;
  double m = 0.0;
  for (double d : nearest_neighbor_distances(c))
    if (std::isfinite(d)) m = std::max(m, d);
  return m;
}

/// Diagonal of the bounding box: an upper bound for the diameter within a factor sqrt(n).
inline double extent(const PointCloud& c) {
  double s = 0.0;
  for (int k = 0; k < c.dim; ++k) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : c.points) {
      lo = std::min(lo, p[k]);
      hi = std::max(hi, p[k]);
    }
    s += (hi - lo) * (hi - lo);
  }
  return std::sqrt(s);
}

inline void require_cloud(const PointCloud& c) {
  if (c.points.empty()) throw PreconditionError("empty cloud");
  for (const auto& p : c.points) {
    if (p.dim() != c.dim) throw DimensionMismatch("cloud point of dimension " + std::to_string(p.dim()));
    if (p.is_infinite()) throw PreconditionError("cloud points must be finite");
  }
}

}  // namespace detail

/// Number of grid boxes [k eps, (k + 1) eps)^n that meet the cloud.
inline std::size_t box_count(const PointCloud& cloud, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw OutOfRange("box side must be positive");
  detail::require_cloud(cloud);
  std::vector<detail::BoxKey> keys;
  keys.reserve(cloud.size());
  for (const auto& p : cloud.points) keys.push_back(detail::box_key(p, cloud.dim, eps));
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

/// Box sides eps_max, eps_max / 2, ... down to no less than eps_min.
struct ScaleWindow {
  double eps_max = 0.0;
  double eps_min = 0.0;

  std::vector<double> scales() const {
    std::vector<double> out;
    for (double e = eps_max; e >= eps_min * (1.0 - 1e-12); e *= 0.5) out.push_back(e);
    return out;
  }
};

/// Powers of two from a quarter of the extent down to twice the resolution.
inline ScaleWindow default_window(const PointCloud& cloud) {
  detail::require_cloud(cloud);
  const double ext = detail::extent(cloud);
  const double res = detail::resolution(cloud);
  if (!(ext > 0.0)) return {1.0, 0.125};
  ScaleWindow w;
  w.eps_max = std::exp2(std::floor(std::log2(ext / 4.0)));
  w.eps_min = std::max(2.0 * res, w.eps_max * 0x1.0p-30);
  return w;
}

struct DimensionFit {
  std::vector<double> epsilons;     // decreasing
  std::vector<std::size_t> counts;  // N(eps)
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  bool flagged = false;  // r2 below 0.98
  std::string label = "box dimension";
};

/// Least-squares slope of log N(eps) against log(1/eps) over the window.
inline DimensionFit fit_dimension(const PointCloud& cloud, const ScaleWindow& window) {
  detail::require_cloud(cloud);
  if (!(window.eps_min > 0.0) || !(window.eps_max >= window.eps_min)) throw OutOfRange("bad scale window");
  const auto eps = window.scales();
  if (eps.size() < 4) throw PreconditionError("a fit needs at least 4 dyadic scales");
  const double res = detail::resolution(cloud);
  if (eps.back() < res)
    throw PreconditionError("scale window reaches below the sampling scale " + std::to_string(res));
  DimensionFit f;
  f.epsilons = eps;
  std::vector<double> x, y;
  for (double e : eps) {
    f.counts.push_back(box_count(cloud, e));
    x.push_back(-std::log(e));
    y.push_back(std::log(static_cast<double>(f.counts.back())));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  f.flagged = f.r2 < 0.98;
  return f;
}

inline DimensionFit fit_dimension(const PointCloud& cloud) { return fit_dimension(cloud, default_window(cloud)); }

struct ContentEstimate {
  double beta = 0.0;
  double content_hat = 0.0;  // upper estimate of the beta-content of the cloud in the ball
  double r = 0.0;
  ExtendedPoint center;
  double ratio() const { return content_hat / std::pow(r, beta); }
};

/// Cheapest cover of pts by balls circumscribing dyadic boxes. A box of side s costs
/// (sqrt(n) s / 2)^beta or the sum over its occupied children, whichever is less; the
/// recursion stops at side `leaf` and starts at the first side of at least `top`.
inline double dyadic_content(const std::vector<ExtendedPoint>& pts, int dim, double beta, double leaf, double top) {
  if (pts.empty()) return 0.0;
  const double conv = 0.5 * std::sqrt(static_cast<double>(dim));
  double side = std::exp2(std::ceil(std::log2(leaf)));
  std::map<detail::BoxKey, double> level;
  for (const auto& p : pts) level.emplace(detail::box_key(p, dim, side), std::pow(conv * side, beta));
  while (side < top) {
    side *= 2.0;
    const double own = std::pow(conv * side, beta);
    std::map<detail::BoxKey, double> up;
    for (const auto& [k, cost] : level) {
      detail::BoxKey parent = k;
      for (int i = 0; i < dim; ++i) parent[i] = k[i] >> 1;  // floor division
      up[parent] += cost;
    }
    for (auto& [k, cost] : up) cost = std::min(cost, own);
    level = std::move(up);
  }
  double total = 0.0;
  for (const auto& kv : level) total += kv.second;
  return total;
}

struct ContentOptions {
  std::vector<double> radii;
  std::vector<ExtendedPoint> centers;  // empty: `trials` cloud points drawn with `seed`
  int trials = 8;
  std::uint64_t seed = 1;
};

struct ContentCheck {
  double beta = 0.0;
  double conversion = 1.0;  // ball radius per box side, sqrt(n) / 2
  std::vector<double> radii;
  std::vector<double> per_radius_min;
  double min_ratio = 0.0;
  double spread = 1.0;  // max / min of per_radius_min
  bool stable = false;  // positive minima varying by less than a factor 4
  std::vector<ContentEstimate> estimates;
};

/// min over trial centres x and radii r of content_hat(B(x, r) & cloud) / r^beta.
inline ContentCheck content_lower_bound_check(const PointCloud& cloud, double beta, const ContentOptions& opt) {
  detail::require_cloud(cloud);
  if (!(beta > 0.0) || beta > cloud.dim) throw OutOfRange("beta must be in (0, n]");
  if (opt.radii.empty()) throw PreconditionError("no radii");
  const double res = detail::resolution(cloud);
  const double ext = detail::extent(cloud);
  for (double r : opt.radii)
    if (!(r >= 10.0 * res) || !(r <= ext))
      throw PreconditionError("radius " + std::to_string(r) + " outside [10 x sampling scale, diameter]");
  std::vector<ExtendedPoint> centers = opt.centers;
  if (centers.empty()) {
    if (opt.trials < 1) throw OutOfRange("trials must be positive");
    std::mt19937_64 g(opt.seed);
    for (int t = 0; t < opt.trials; ++t) centers.push_back(cloud.points[g() % cloud.size()]);
  }
  const KdTree tree(cloud.flat(), cloud.dim);
  ContentCheck out;
  out.beta = beta;
  out.conversion = 0.5 * std::sqrt(static_cast<double>(cloud.dim));
  out.radii = opt.radii;
  out.min_ratio = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> hits;
  std::vector<ExtendedPoint> ball;
  for (double r : opt.radii) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : centers) {
      if (x.dim() != cloud.dim || x.is_infinite()) throw DimensionMismatch("centre must be a finite point of the cloud's space");
      std::array<double, ExtendedPoint::kMaxDim> q{};
      for (int k = 0; k < cloud.dim; ++k) q[k] = x[k];
      hits.clear();
      tree.radius(q.data(), r * r, hits);
      std::sort(hits.begin(), hits.end());
      ball.clear();
      for (auto i : hits) ball.push_back(cloud.points[i]);
      ContentEstimate e;
      e.beta = beta;
      e.r = r;
      e.center = x;
      e.content_hat = dyadic_content(ball, cloud.dim, beta, res, 2.0 * r);
      best = std::min(best, e.ratio());
      out.estimates.push_back(std::move(e));
    }
    out.per_radius_min.push_back(best);
    out.min_ratio = std::min(out.min_ratio, best);
  }
  const double hi = *std::max_element(out.per_radius_min.begin(), out.per_radius_min.end());
  out.spread = out.min_ratio > 0.0 ? hi / out.min_ratio : std::numeric_limits<double>::infinity();
  out.stable = out.min_ratio > 0.0 && out.spread < 4.0;
  return out;
}

}  // namespace uniperf
