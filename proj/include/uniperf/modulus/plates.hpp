#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "uniperf/error.hpp"
#include "uniperf/kdtree.hpp"
#include "uniperf/modulus/lattice.hpp"

namespace uniperf::modulus {

/// A closed set given by its (signed) distance function in chart coordinates.
/// Solid shapes have interior and sd < 0 inside; thin shapes (curves, points) have sd >= 0.
class Shape {
 public:
  virtual ~Shape() = default;
  virtual double sd(const Vec3& x) const = 0;
  virtual bool solid() const = 0;
  virtual std::string describe() const = 0;
};

namespace detail {
inline double norm(const Vec3& v, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += v[a] * v[a];
  return std::sqrt(s);
}
inline double segment_distance(const Vec3& x, const Vec3& a, const Vec3& b, int dim) {
  double ab2 = 0.0, t = 0.0;
  for (int k = 0; k < dim; ++k) {
    ab2 += (b[k] - a[k]) * (b[k] - a[k]);
    t += (x[k] - a[k]) * (b[k] - a[k]);
  }
  t = ab2 > 0.0 ? std::clamp(t / ab2, 0.0, 1.0) : 0.0;
  double s = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double d = x[k] - (a[k] + t * (b[k] - a[k]));
    s += d * d;
  }
  return std::sqrt(s);
}
}  // namespace detail

class BallShape final : public Shape {
 public:
  BallShape(Vec3 c, double r, int dim) : c_(c), r_(r), dim_(dim) {
    if (!(r > 0.0)) throw OutOfRange("ball radius must be positive");
  }
  double sd(const Vec3& x) const override {
    Vec3 d{};
    for (int a = 0; a < dim_; ++a) d[a] = x[a] - c_[a];
    return detail::norm(d, dim_) - r_;
  }
  bool solid() const override { return true; }
  std::string describe() const override { return "ball r=" + std::to_string(r_); }

 private:
  Vec3 c_;
  double r_;
  int dim_;
};

/// {x : |x - c| >= r}.
class BallComplementShape final : public Shape {
 public:
  BallComplementShape(Vec3 c, double r, int dim) : c_(c), r_(r), dim_(dim) {
    if (!(r > 0.0)) throw OutOfRange("ball radius must be positive");
  }
  double sd(const Vec3& x) const override {
    Vec3 d{};
    for (int a = 0; a < dim_; ++a) d[a] = x[a] - c_[a];
    return r_ - detail::norm(d, dim_);
  }
  bool solid() const override { return true; }
  std::string describe() const override { return "ball complement r=" + std::to_string(r_); }

 private:
  Vec3 c_;
  double r_;
  int dim_;
};

/// The sphere {x : |x - c| = r} as a thin shell.
class SphereShape final : public Shape {
 public:
  SphereShape(Vec3 c, double r, int dim) : c_(c), r_(r), dim_(dim) {
    if (!(r > 0.0)) throw OutOfRange("sphere radius must be positive");
  }
  double sd(const Vec3& x) const override {
    Vec3 d{};
    for (int a = 0; a < dim_; ++a) d[a] = x[a] - c_[a];
    return std::abs(detail::norm(d, dim_) - r_);
  }
  bool solid() const override { return false; }
  std::string describe() const override { return "sphere r=" + std::to_string(r_); }

 private:
  Vec3 c_;
  double r_;
  int dim_;
};

/// Open polygonal chain (a single segment when given two vertices).
class PolylineShape final : public Shape {
 public:
  PolylineShape(std::vector<Vec3> v, int dim) : v_(std::move(v)), dim_(dim) {
    if (v_.empty()) throw PreconditionError("polyline needs a vertex");
  }
  double sd(const Vec3& x) const override {
    if (v_.size() == 1) return detail::segment_distance(x, v_[0], v_[0], dim_);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < v_.size(); ++i)
      best = std::min(best, detail::segment_distance(x, v_[i], v_[i + 1], dim_));
    return best;
  }
  bool solid() const override { return false; }
  std::string describe() const override {
    return "polyline with " + std::to_string(v_.size()) + " vertices";
  }

 private:
  std::vector<Vec3> v_;
  int dim_;
};

/// Union of closed balls of one radius around a point cloud; radius 0 gives the bare points.
class DilatedPointsShape final : public Shape {
 public:
  DilatedPointsShape(const std::vector<Vec3>& pts, double radius, int dim)
      : radius_(radius), dim_(dim) {
    if (pts.empty()) throw PreconditionError("empty point set");
    std::vector<double> flat;
    flat.reserve(pts.size() * static_cast<std::size_t>(dim));
    for (const auto& p : pts)
      for (int a = 0; a < dim; ++a) flat.push_back(p[a]);
    tree_ = KdTree(std::move(flat), dim);
  }
  double sd(const Vec3& x) const override {
    return std::sqrt(tree_.nearest(x.data()).dist2) - radius_;
  }
  bool solid() const override { return radius_ > 0.0; }
  std::string describe() const override {
    return std::to_string(tree_.size()) + " points dilated by " + std::to_string(radius_);
  }

 private:
  KdTree tree_;
  double radius_;
  int dim_;
};

/// Closed half-space {x : sign * (x[axis] - value) >= 0}.
class HalfSpaceShape final : public Shape {
 public:
  HalfSpaceShape(int axis, double value, int sign) : axis_(axis), value_(value), sign_(sign) {}
  double sd(const Vec3& x) const override { return -sign_ * (x[axis_] - value_); }
  bool solid() const override { return true; }
  std::string describe() const override { return "half-space"; }

 private:
  int axis_;
  double value_;
  int sign_;
};

/// Axis-parallel half-line {base + t * sign * e_axis : t >= 0} in a 2-d chart.
class HalfLineShape final : public Shape {
 public:
  HalfLineShape(Vec3 base, int axis, int sign, int dim)
      : base_(base), axis_(axis), sign_(sign), dim_(dim) {}
  double sd(const Vec3& x) const override {
    double s = 0.0;
    for (int a = 0; a < dim_; ++a) {
      double d = x[a] - base_[a];
      if (a == axis_) d = std::min(0.0, sign_ * d);
      s += d * d;
    }
    return std::sqrt(s);
  }
  bool solid() const override { return false; }
  std::string describe() const override { return "half-line"; }

 private:
  Vec3 base_;
  int axis_;
  int sign_;
  int dim_;
};

/// A plate: finite union of shapes.
struct Plate {
  std::vector<std::shared_ptr<const Shape>> shapes;

  bool empty() const { return shapes.empty(); }
  void add(std::shared_ptr<const Shape> s) { shapes.push_back(std::move(s)); }

  template <class S, class... A>
  Plate& with(A&&... args) {
    shapes.push_back(std::make_shared<S>(std::forward<A>(args)...));
    return *this;
  }
};

}  // namespace uniperf::modulus
