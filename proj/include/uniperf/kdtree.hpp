#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

namespace uniperf {

/// Static k-d tree over points of dimension up to 4, stored as flat rows.
class KdTree {
 public:
  KdTree() = default;

  KdTree(std::vector<double> flat, int dim) : pts_(std::move(flat)), dim_(dim) {
    const std::size_t m = dim_ > 0 ? pts_.size() / static_cast<std::size_t>(dim_) : 0;
    idx_.resize(m);
    std::iota(idx_.begin(), idx_.end(), 0u);
    if (m) build(0, m, 0);
  }

  std::size_t size() const noexcept { return idx_.size(); }
  int dim() const noexcept { return dim_; }
  const double* point(std::size_t i) const { return &pts_[i * static_cast<std::size_t>(dim_)]; }

  struct Hit {
    std::uint32_t index;
    double dist2;
  };

  /// Nearest point to q, or index UINT32_MAX for an empty tree.
  Hit nearest(const double* q) const {
    Hit best{std::numeric_limits<std::uint32_t>::max(), std::numeric_limits<double>::infinity()};
    if (!idx_.empty()) nearest_rec(0, idx_.size(), 0, q, best);
    return best;
  }

  /// k nearest neighbours sorted by distance, ties broken by index.
  std::vector<Hit> knn(const double* q, std::size_t k) const {
    std::vector<Hit> heap;
    if (k == 0 || idx_.empty()) return heap;
    heap.reserve(k + 1);
    knn_rec(0, idx_.size(), 0, q, k, heap);
    std::sort_heap(heap.begin(), heap.end(), less);
    return heap;
  }

  /// Indices with squared distance <= r2, unsorted.
  void radius(const double* q, double r2, std::vector<std::uint32_t>& out) const {
    if (!idx_.empty()) radius_rec(0, idx_.size(), 0, q, r2, out);
  }

 private:
  static bool less(const Hit& a, const Hit& b) {
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
  }

  double d2(std::uint32_t i, const double* q) const {
    const double* p = point(i);
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) {
      const double t = p[k] - q[k];
      s += t * t;
    }
    return s;
  }

  void build(std::size_t lo, std::size_t hi, int depth) {
    if (hi - lo <= 1) return;
    const int axis = depth % dim_;
    const std::size_t mid = (lo + hi) / 2;
    std::nth_element(idx_.begin() + static_cast<std::ptrdiff_t>(lo),
                     idx_.begin() + static_cast<std::ptrdiff_t>(mid),
                     idx_.begin() + static_cast<std::ptrdiff_t>(hi),
                     [&](std::uint32_t a, std::uint32_t b) {
                       const double pa = point(a)[axis], pb = point(b)[axis];
                       return pa < pb || (pa == pb && a < b);
                     });
    build(lo, mid, depth + 1);
    build(mid + 1, hi, depth + 1);
  }

  void nearest_rec(std::size_t lo, std::size_t hi, int depth, const double* q, Hit& best) const {
    if (lo >= hi) return;
    const std::size_t mid = (lo + hi) / 2;
    const std::uint32_t i = idx_[mid];
    const double dd = d2(i, q);
    if (dd < best.dist2 || (dd == best.dist2 && i < best.index)) best = {i, dd};
    if (hi - lo == 1) return;
    const int axis = depth % dim_;
    const double diff = q[axis] - point(i)[axis];
    const bool left_first = diff < 0;
    if (left_first) nearest_rec(lo, mid, depth + 1, q, best);
    else nearest_rec(mid + 1, hi, depth + 1, q, best);
    if (diff * diff <= best.dist2) {
      if (left_first) nearest_rec(mid + 1, hi, depth + 1, q, best);
      else nearest_rec(lo, mid, depth + 1, q, best);
    }
  }

  void knn_rec(std::size_t lo, std::size_t hi, int depth, const double* q, std::size_t k,
               std::vector<Hit>& heap) const {
    if (lo >= hi) return;
    const std::size_t mid = (lo + hi) / 2;
    const std::uint32_t i = idx_[mid];
    const Hit h{i, d2(i, q)};
    if (heap.size() < k) {
      heap.push_back(h);
      std::push_heap(heap.begin(), heap.end(), less);
    } else if (less(h, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), less);
      heap.back() = h;
      std::push_heap(heap.begin(), heap.end(), less);
    }
    if (hi - lo == 1) return;
    const int axis = depth % dim_;
    const double diff = q[axis] - point(i)[axis];
    const bool left_first = diff < 0;
    if (left_first) knn_rec(lo, mid, depth + 1, q, k, heap);
    else knn_rec(mid + 1, hi, depth + 1, q, k, heap);
    if (heap.size() < k || diff * diff <= heap.front().dist2) {
      if (left_first) knn_rec(mid + 1, hi, depth + 1, q, k, heap);
      else knn_rec(lo, mid, depth + 1, q, k, heap);
    }
  }

  void radius_rec(std::size_t lo, std::size_t hi, int depth, const double* q, double r2,
                  std::vector<std::uint32_t>& out) const {
    if (lo >= hi) return;
    const std::size_t mid = (lo + hi) / 2;
    const std::uint32_t i = idx_[mid];
    if (d2(i, q) <= r2) out.push_back(i);
    if (hi - lo == 1) return;
    const int axis = depth % dim_;
    const double diff = q[axis] - point(i)[axis];
    if (diff <= 0 || diff * diff <= r2) radius_rec(lo, mid, depth + 1, q, r2, out);
    if (diff >= 0 || diff * diff <= r2) radius_rec(mid + 1, hi, depth + 1, q, r2, out);
  }

  std::vector<double> pts_;
  std::vector<std::uint32_t> idx_;
  int dim_ = 0;
};

}  // namespace uniperf
