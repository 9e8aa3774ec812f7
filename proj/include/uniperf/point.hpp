#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <span>
#include <string>

#include "uniperf/error.hpp"

namespace uniperf {

/// A point of the one-point compactification R^n u {inf}.
class ExtendedPoint {
 public:
  static constexpr int kMaxDim = 4;

  ExtendedPoint() = default;

  explicit ExtendedPoint(std::span<const double> coords) { assign(coords); }

  ExtendedPoint(std::initializer_list<double> coords) {
    assign(std::span<const double>(coords.begin(), coords.size()));
  }

  static ExtendedPoint infinity(int dim) {
    check_dim(dim);
    ExtendedPoint p;
    p.dim_ = dim;
    p.infinite_ = true;
    return p;
  }

  static ExtendedPoint origin(int dim) {
    check_dim(dim);
    ExtendedPoint p;
    p.dim_ = dim;
    return p;
  }

  int dim() const noexcept { return dim_; }
  bool is_infinite() const noexcept { return infinite_; }
  bool is_finite() const noexcept { return !infinite_; }

  double operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const noexcept {
    return {c_.data(), static_cast<std::size_t>(dim_)};
  }

  double norm2() const noexcept {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += c_[i] * c_[i];
    return s;
  }
  double norm() const noexcept { return std::sqrt(norm2()); }

  std::string to_string() const {
    if (infinite_) return "inf";
    std::string s = "(";
    for (int i = 0; i < dim_; ++i) {
      if (i) s += ", ";
      s += std::to_string(c_[i]);
    }
    return s + ")";
  }

  friend bool operator==(const ExtendedPoint& a, const ExtendedPoint& b) {
    if (a.dim_ != b.dim_ || a.infinite_ != b.infinite_) return false;
    if (a.infinite_) return true;
    for (int i = 0; i < a.dim_; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

 private:
  static void check_dim(int dim) {
    if (dim < 1 || dim > kMaxDim)
      throw OutOfRange("point dimension must be in 1.." + std::to_string(kMaxDim));
  }

  void assign(std::span<const double> coords) {
    check_dim(static_cast<int>(coords.size()));
    dim_ = static_cast<int>(coords.size());
    for (int i = 0; i < dim_; ++i) {
      if (!std::isfinite(coords[i])) throw OutOfRange("non-finite coordinate");
      c_[i] = coords[i];
    }
  }

  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
  bool infinite_ = false;
};

inline void require_same_dim(const ExtendedPoint& a, const ExtendedPoint& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("points of dimension " + std::to_string(a.dim()) + " and " +
                            std::to_string(b.dim()));
}

/// Euclidean distance between finite points.
inline double euclidean_distance(const ExtendedPoint& a, const ExtendedPoint& b) {
  require_same_dim(a, b);
  if (a.is_infinite() || b.is_infinite())
    throw PreconditionError("Euclidean distance to infinity");
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace uniperf
