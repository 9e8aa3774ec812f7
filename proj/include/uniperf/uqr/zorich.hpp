#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "uniperf/error.hpp"

namespace uniperf::uqr {

using Vec3d = std::array<double, 3>;

/// Beam index and local coordinates of a point of R^3 under the Zorich tiling.
/// The fundamental beam is [-1, 1]^2 x R; beam (j, k) is its image under the
/// reflections that take [-1, 1] to [2j - 1, 2j + 1] and [2k - 1, 2k + 1].
struct ZorichChart {
  int j = 0;
  int k = 0;
  double a = 0.0;
  double b = 0.0;
  double t = 0.0;

  Vec3d embed() const {
    return {2.0 * j + (j % 2 ? -a : a), 2.0 * k + (k % 2 ? -b : b), t};
  }
};

namespace detail {

inline int beam_of(double x) { return static_cast<int>(std::floor(0.5 * (x + 1.0))); }

inline double fold(double x, int j) {
  const double a = x - 2.0 * j;
  return j % 2 ? -a : a;
}

}  // namespace detail

/// Square [-1, 1]^2 onto the closed unit disc, scaling each ray from max-norm to Euclidean norm.
inline std::array<double, 2> square_to_disk(double a, double b) {
  const double r = std::hypot(a, b);
  if (r == 0.0) return {0.0, 0.0};
  const double s = std::max(std::abs(a), std::abs(b)) / r;
  return {a * s, b * s};
}

inline std::array<double, 2> disk_to_square(double p, double q) {
  const double m = std::max(std::abs(p), std::abs(q));
  if (m == 0.0) return {0.0, 0.0};
  const double s = std::hypot(p, q) / m;
  return {p * s, q * s};
}

/// Beam map h: the square onto the closed upper unit hemisphere. The disc radius becomes
/// polar angle (radius 1 lands on the equator), which keeps h bi-Lipschitz.
inline Vec3d beam_map(double a, double b) {
  const auto q = square_to_disk(a, b);
  const double rho = std::hypot(q[0], q[1]);
  if (rho == 0.0) return {0.0, 0.0, 1.0};
  const double th = 0.5 * std::numbers::pi * std::min(rho, 1.0);
  const double s = std::sin(th) / rho;
  return {q[0] * s, q[1] * s, std::cos(th)};
}

/// Zorich map: e^{x3} h(x1, x2) on the fundamental beam, extended by reflections in the
/// beam faces, with each reflection mirrored in the plane y3 = 0. |Z(x)| = e^{x3}.
inline Vec3d zorich(const Vec3d& x) {
  const int j = detail::beam_of(x[0]), k = detail::beam_of(x[1]);
  const auto h = beam_map(detail::fold(x[0], j), detail::fold(x[1], k));
  const double r = std::exp(x[2]);
  const double s = (j + k) % 2 ? -1.0 : 1.0;
  return {r * h[0], r * h[1], r * s * h[2]};
}

/// Preimage chart of y: beam (0, 0) over the closed upper half space, beam (1, 0) below.
inline ZorichChart zorich_inverse(const Vec3d& y) {
  const double rho = std::hypot(y[0], y[1], y[2]);
  if (!(rho > 0.0) || !std::isfinite(rho)) throw PreconditionError("zorich_inverse needs y != 0, inf");
  const double horiz = std::hypot(y[0], y[1]);
  const double th = std::atan2(horiz, std::abs(y[2]));
  const double disk = th / (0.5 * std::numbers::pi);
  std::array<double, 2> q{0.0, 0.0};
  if (horiz > 0.0) q = {y[0] / horiz * disk, y[1] / horiz * disk};
  const auto sq = disk_to_square(q[0], q[1]);
  ZorichChart c;
  c.a = std::clamp(sq[0], -1.0, 1.0);
  c.b = std::clamp(sq[1], -1.0, 1.0);
  c.t = std::log(rho);
  if (y[2] < 0.0) c.j = 1;
  return c;
}

/// Affine map d (x - p) + p with p = (1, 1, 0). It fixes a beam corner line, so it
/// normalises the symmetry group of Z for every integer d, and Z o A o Z^{-1} is well defined.
inline Vec3d zorich_dilation(const Vec3d& x, double d) {
  return {1.0 + d * (x[0] - 1.0), 1.0 + d * (x[1] - 1.0), d * x[2]};
}

/// Horizontal distance of x to the nearest beam edge, the vertical lines over (odd, odd).
/// These lines form the branch set of Z.
inline double beam_edge_distance(const Vec3d& x) {
  auto odd = [](double v) {
    const double m = std::fmod(std::abs(v - 1.0), 2.0);
    return std::min(m, 2.0 - m);
  };
  return std::hypot(odd(x[0]), odd(x[1]));
}

}  // namespace uniperf::uqr
