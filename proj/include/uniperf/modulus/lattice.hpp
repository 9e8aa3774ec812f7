#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "uniperf/error.hpp"

namespace uniperf::modulus {

/// Coordinate system of the lattice. Plates and paths live in chart coordinates.
enum class Chart : std::uint16_t {
  Cartesian = 0,
  /// (xi, theta) = (log r, angle), theta periodic; the plane with the n = 2 energy.
  LogPolar = 1,
  /// (xi, theta) = (log r, polar angle in [0, pi]); rotationally symmetric R^3.
  AxisymmetricLogSpherical = 2,
};

inline const char* to_string(Chart c) {
  switch (c) {
    case Chart::Cartesian: return "cartesian";
    case Chart::LogPolar: return "log-polar";
    case Chart::AxisymmetricLogSpherical: return "axisymmetric-log-spherical";
  }
  return "?";
}

using Vec3 = std::array<double, 3>;

struct StencilDir {
  std::array<int, 3> offset{};
  double length = 0.0;  // in units of h
};

/// Primitive lattice vectors with max |component| <= radius.
inline std::vector<StencilDir> make_stencil(int dim, int radius) {
  std::vector<StencilDir> out;
  const int r3 = dim == 3 ? radius : 0;
  for (int i = -radius; i <= radius; ++i)
    for (int j = -radius; j <= radius; ++j)
      for (int k = -r3; k <= r3; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        if (std::gcd(std::gcd(std::abs(i), std::abs(j)), std::abs(k)) != 1) continue;
        out.push_back({{i, j, k}, std::sqrt(double(i * i + j * j + k * k))});
      }
  return out;
}

/// Regular grid of nodes origin + h * index over a 2-d or 3-d chart.
struct Lattice {
  int dim = 2;    // grid dimension
  int n = 2;      // dimension of the underlying space (energy exponent by default)
  Chart chart = Chart::Cartesian;
  std::array<int, 3> size{1, 1, 1};
  Vec3 origin{};
  double h = 1.0;
  std::array<bool, 3> periodic{false, false, false};

  std::size_t node_count() const {
    return static_cast<std::size_t>(size[0]) * static_cast<std::size_t>(size[1]) *
           static_cast<std::size_t>(size[2]);
  }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * static_cast<std::size_t>(size[1]) +
            static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(size[0]) +
           static_cast<std::size_t>(i);
  }
  std::array<int, 3> unpack(std::size_t idx) const {
    const int i = static_cast<int>(idx % static_cast<std::size_t>(size[0]));
    idx /= static_cast<std::size_t>(size[0]);
    const int j = static_cast<int>(idx % static_cast<std::size_t>(size[1]));
    const int k = static_cast<int>(idx / static_cast<std::size_t>(size[1]));
    return {i, j, k};
  }
  Vec3 coords(const std::array<int, 3>& ijk) const {
    Vec3 x{};
    for (int a = 0; a < dim; ++a) x[a] = origin[a] + h * ijk[a];
    return x;
  }
  Vec3 coords(std::size_t idx) const { return coords(unpack(idx)); }
  double period(int axis) const { return h * size[axis]; }

  /// Neighbour index along an offset, or false when it leaves a non-periodic side.
  bool shift(const std::array<int, 3>& ijk, const std::array<int, 3>& off,
             std::size_t& out) const {
    std::array<int, 3> t{};
    for (int a = 0; a < 3; ++a) {
      int v = ijk[a] + off[a];
      if (v < 0 || v >= size[a]) {
        if (!periodic[a]) return false;
        v = ((v % size[a]) + size[a]) % size[a];
      }
      t[a] = v;
    }
    out = index(t[0], t[1], t[2]);
    return true;
  }

  /// Cell of a node clipped to the lattice extent along non-periodic axes.
  std::array<std::array<double, 2>, 3> cell(const std::array<int, 3>& ijk) const {
    std::array<std::array<double, 2>, 3> c{};
    for (int a = 0; a < dim; ++a) {
      const double x = origin[a] + h * ijk[a];
      c[a] = {x - 0.5 * h, x + 0.5 * h};
      if (!periodic[a]) {
        c[a][0] = std::max(c[a][0], origin[a]);
        c[a][1] = std::min(c[a][1], origin[a] + h * (size[a] - 1));
      }
    }
    return c;
  }

  /// Chart volume element integrated over the clipped cell of a node.
  double cell_weight(const std::array<int, 3>& ijk) const {
    const auto c = cell(ijk);
    double w = 1.0;
    switch (chart) {
      case Chart::Cartesian:
      case Chart::LogPolar:
        for (int a = 0; a < dim; ++a) w *= c[a][1] - c[a][0];
        return w;
      case Chart::AxisymmetricLogSpherical: {
        const double lo = std::max(0.0, c[1][0]);
        const double hi = std::min(std::numbers::pi, c[1][1]);
        return 2.0 * std::numbers::pi * (c[0][1] - c[0][0]) * (std::cos(lo) - std::cos(hi));
      }
    }
    return 0.0;
  }

  /// Relative volume density of the chart at x (constant except on the axisymmetric chart).
  double density(const Vec3& x) const {
    return chart == Chart::AxisymmetricLogSpherical ? std::sin(x[1]) : 1.0;
  }

  void validate() const {
    if (dim != 2 && dim != 3) throw OutOfRange("lattice dimension must be 2 or 3");
    if (!(h > 0.0)) throw OutOfRange("lattice spacing must be positive");
    for (int a = 0; a < dim; ++a)
      if (size[a] < 2) throw OutOfRange("lattice needs at least two nodes per axis");
    if (chart != Chart::Cartesian && dim != 2)
      throw PreconditionError(std::string("chart ") + to_string(chart) + " is two-dimensional");
  }
};

/// Cartesian lattice covering [lo, hi] with `cells` cells along the longest side.
inline Lattice cartesian_lattice(int dim, const Vec3& lo, const Vec3& hi, int cells) {
  if (cells < 2) throw OutOfRange("resolution must be at least 2");
  Lattice L;
  L.dim = dim;
  L.n = dim;
  double longest = 0.0;
  for (int a = 0; a < dim; ++a) longest = std::max(longest, hi[a] - lo[a]);
  if (!(longest > 0.0)) throw OutOfRange("empty bounding box");
  L.h = longest / cells;
  for (int a = 0; a < dim; ++a) {
    L.size[a] = static_cast<int>(std::ceil((hi[a] - lo[a]) / L.h - 1e-9)) + 1;
    const double span = (L.size[a] - 1) * L.h;
    L.origin[a] = 0.5 * (lo[a] + hi[a]) - 0.5 * span;
  }
  return L;
}

}  // namespace uniperf::modulus
