#pragma once

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "uniperf/error.hpp"
#include "uniperf/point_cloud.hpp"

namespace uniperf {

namespace detail {

inline std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Centres of the 2^depth intervals of the depth-k middle-lambda Cantor construction on
/// [0, 1], placed on the first axis of R^dim. Interval centres sit strictly inside every
/// triadic box of side at least the interval length, so box counts are exact there.
inline PointCloud cantor_cloud(int depth, double lambda = 1.0 / 3.0, int dim = 2) {
  if (depth < 1 || depth > 24) throw OutOfRange("cantor depth must be in 1..24");
  if (!(lambda > 0.0 && lambda < 1.0)) throw OutOfRange("lambda must be in (0, 1)");
  const double keep = 0.5 * (1.0 - lambda);
  std::vector<std::pair<double, double>> level{{0.0, 1.0}};
  for (int k = 0; k < depth; ++k) {
    std::vector<std::pair<double, double>> next;
    next.reserve(level.size() * 2);
    for (const auto& [a, b] : level) {
      const double len = (b - a) * keep;
      next.push_back({a, a + len});
      next.push_back({b - len, b});
    }
    level = std::move(next);
  }
  PointCloud c;
  c.dim = dim;
  for (const auto& [a, b] : level) {
    double x[ExtendedPoint::kMaxDim] = {};
    x[0] = 0.5 * (a + b);
    c.points.emplace_back(std::span<const double>(x, static_cast<std::size_t>(dim)));
  }
  c.set("generator", "cantor");
  c.set("lambda", detail::exact(lambda));
  c.set("depth", std::to_string(depth));
  c.set("sampling_scale", detail::exact(std::pow(keep, depth)));
  return c;
}

/// m equally spaced points on the circle of radius r about the origin.
inline PointCloud circle_cloud(int m, double r = 1.0) {
  if (m < 2) throw OutOfRange("need at least two points");
  PointCloud c;
  c.dim = 2;
  for (int i = 0; i < m; ++i) {
    const double a = 2.0 * std::numbers::pi * i / m;
    c.points.push_back({r * std::cos(a), r * std::sin(a)});
  }
  c.set("generator", "circle");
  c.set("points", std::to_string(m));
  c.set("sampling_scale", detail::exact(2.0 * r * std::sin(std::numbers::pi / m)));
  return c;
}

/// Lattice points of spacing h inside the closed ball of radius r about the origin.
inline PointCloud ball_cloud(int dim, double r, double h) {
  if (dim < 1 || dim > 3) throw OutOfRange("ball dimension must be 1..3");
  if (!(h > 0.0) || !(r > h)) throw OutOfRange("need 0 < h < r");
  const int m = static_cast<int>(std::floor(r / h));
  PointCloud c;
  c.dim = dim;
  const int mz = dim > 2 ? m : 0, my = dim > 1 ? m : 0;
  for (int i = -m; i <= m; ++i)
    for (int j = -my; j <= my; ++j)
      for (int k = -mz; k <= mz; ++k) {
        const double x[3] = {i * h, j * h, k * h};
        if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= r * r)
          c.points.emplace_back(std::span<const double>(x, static_cast<std::size_t>(dim)));
      }
  c.set("generator", "ball");
  c.set("sampling_scale", detail::exact(h));
  return c;
}

}  // namespace uniperf
