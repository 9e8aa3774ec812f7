#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "uniperf/error.hpp"
#include "uniperf/kdtree.hpp"
#include "uniperf/point.hpp"

namespace uniperf {

/// Finite sample of a compact set, with ordered key=value metadata.
struct PointCloud {
  int dim = 2;
  std::vector<ExtendedPoint> points;
  std::vector<std::pair<std::string, std::string>> meta;

  std::size_t size() const { return points.size(); }

  const std::string* find(const std::string& key) const {
    for (const auto& kv : meta)
      if (kv.first == key) return &kv.second;
    return nullptr;
  }
  std::string get(const std::string& key, const std::string& fallback = "") const {
    const auto* v = find(key);
    return v ? *v : fallback;
  }
  void set(const std::string& key, const std::string& value) {
    for (auto& kv : meta)
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    meta.emplace_back(key, value);
  }

  /// Generator sampling scale from the metadata, NaN when absent.
  double sampling_scale() const {
    const auto* v = find("sampling_scale");
    if (!v) return std::numeric_limits<double>::quiet_NaN();
    try {
      return std::stod(*v);
    } catch (const std::exception&) {
      throw InputError("sampling_scale metadata is not a number");
    }
  }

  double coord(std::size_t i, int k) const { return points[i][k]; }

  std::vector<double> flat() const {
    std::vector<double> f;
    f.reserve(points.size() * static_cast<std::size_t>(dim));
    for (const auto& p : points)
      for (int k = 0; k < dim; ++k) f.push_back(p[k]);
    return f;
  }
};

/// Checks dimension, finiteness and that at least two points differ by more than 1e-12.
inline void validate_cloud(const PointCloud& c) {
  if (c.dim < 1 || c.dim > ExtendedPoint::kMaxDim) throw OutOfRange("cloud dimension out of range");
  for (const auto& p : c.points) {
    if (p.dim() != c.dim) throw DimensionMismatch("cloud point of dimension " + std::to_string(p.dim()));
    if (p.is_infinite()) throw PreconditionError("cloud points must be finite");
  }
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    double d2 = 0.0;
    for (int k = 0; k < c.dim; ++k) d2 += (c.points[i][k] - c.points[0][k]) * (c.points[i][k] - c.points[0][k]);
    if (d2 > 1e-24) return;
  }
  throw PreconditionError("a cloud needs at least two distinct points");
}

/// Removes points within 1e-12 of an earlier kept point, keeping the first occurrence.
inline PointCloud deduplicate(const PointCloud& c) {
  PointCloud out;
  out.dim = c.dim;
  out.meta = c.meta;
  if (c.points.empty()) return out;
  const KdTree tree(c.flat(), c.dim);
  std::vector<std::uint8_t> gone(c.size(), 0);
  std::vector<std::uint32_t> hits;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (gone[i]) continue;
    out.points.push_back(c.points[i]);
    std::array<double, ExtendedPoint::kMaxDim> q{};
    for (int k = 0; k < c.dim; ++k) q[k] = c.points[i][k];
    hits.clear();
    tree.radius(q.data(), 1e-24, hits);
    for (auto j : hits)
      if (j > i) gone[j] = 1;
  }
  return out;
}

/// Distance from each point to its nearest other point.
inline std::vector<double> nearest_neighbor_distances(const PointCloud& c) {
  const KdTree tree(c.flat(), c.dim);
  std::vector<double> out(c.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < c.size(); ++i) {
    std::array<double, ExtendedPoint::kMaxDim> q{};
    for (int k = 0; k < c.dim; ++k) q[k] = c.points[i][k];
    for (const auto& h : tree.knn(q.data(), 2))
      if (h.index != i) out[i] = std::min(out[i], std::sqrt(h.dist2));
  }
  return out;
}

/// Value at fraction q in [0, 1] of the sorted data (nearest rank).
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const auto k = static_cast<std::size_t>(std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1) + 0.5);
  return v[std::min(k, v.size() - 1)];
}

/// Euclidean diameter of a point set.
inline double diameter(const std::vector<ExtendedPoint>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double d2 = 0.0;
      for (int k = 0; k < pts[i].dim(); ++k) d2 += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      best = std::max(best, d2);
    }
  return std::sqrt(best);
}

}  // namespace uniperf
