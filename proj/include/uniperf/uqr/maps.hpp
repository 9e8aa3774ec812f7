#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "uniperf/error.hpp"
#include "uniperf/point.hpp"
#include "uniperf/uqr/zorich.hpp"

namespace uniperf::uqr {

enum class Family { PlanarPower, PlanarChebyshev, Quadratic, ZorichPower };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::PlanarPower: return "planar_power";
    case Family::PlanarChebyshev: return "planar_chebyshev";
    case Family::Quadratic: return "quadratic";
    case Family::ZorichPower: return "zorich_power";
  }
  return "?";
}

struct MapDescriptor {
  std::string name;
  Family family = Family::PlanarPower;
  int degree = 2;
  std::complex<double> c{0.0, 0.0};
  int dim = 2;
  double K = 1.0;             // declared dilatation bound, valid for every iterate
  double holder_alpha = 1.0;  // K_I^{1/(1-n)} with K_I = K
  double escape_radius = 4.0;
};

/// Singular-value data of a derivative matrix.
struct Distortion {
  int dim = 2;
  double max_stretch = 0.0;
  double min_stretch = 0.0;
  double jacobian = 0.0;
  double outer() const { return std::pow(max_stretch, dim) / std::abs(jacobian); }  // K_O
  double inner() const { return std::abs(jacobian) / std::pow(min_stretch, dim); }  // K_I
};

using VecFn = std::function<Vec3d(const Vec3d&)>;

/// Central-difference derivative of F at x in the first n coordinates.
inline Eigen::MatrixXd jacobian(const VecFn& F, const Vec3d& x, int n, double h) {
  Eigen::MatrixXd J(n, n);
  for (int c = 0; c < n; ++c) {
    Vec3d lo = x, hi = x;
    lo[c] -= h;
    hi[c] += h;
    const auto a = F(lo), b = F(hi);
    for (int r = 0; r < n; ++r) J(r, c) = (b[r] - a[r]) / (2.0 * h);
  }
  return J;
}

inline Distortion distortion(const Eigen::MatrixXd& J) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const auto& s = svd.singularValues();
  Distortion d;
  d.dim = static_cast<int>(J.rows());
  d.max_stretch = s(0);
  d.min_stretch = s(s.size() - 1);
  d.jacobian = J.determinant();
  return d;
}

struct ZorichDilatation {
  double outer = 1.0;
  double inner = 1.0;
};

/// K_O and K_I of Z measured on an offset grid over the fundamental beam. Z(x + t e3) = e^t Z(x),
/// so one horizontal slice covers every height.
inline ZorichDilatation measure_zorich_dilatation(int grid = 200, double h = 1e-6) {
  ZorichDilatation out;
  const VecFn Z = [](const Vec3d& x) { return zorich(x); };
  for (int i = 0; i < grid; ++i)
    for (int k = 0; k < grid; ++k) {
      const Vec3d x{-1.0 + (i + 0.5) * 2.0 / grid, -1.0 + (k + 0.5 + 0.137) * 2.0 / (grid + 1), 0.0};
      const auto d = distortion(jacobian(Z, x, 3, h));
      out.outer = std::max(out.outer, d.outer());
      out.inner = std::max(out.inner, d.inner());
    }
  return out;
}

/// K for Z o A o Z^{-1} and its iterates: K_O(Z) K_I(Z) bounds both K_O and K_I of
/// the conjugate, rounded up by 10%.
inline double zorich_declared_dilatation() {
  static const double k = [] {
    const auto z = measure_zorich_dilatation();
    return 1.1 * z.outer * z.inner;
  }();
  return k;
}

inline MapDescriptor planar_power(int d) {
  if (d < 2) throw OutOfRange("degree must be at least 2");
  return {"power" + std::to_string(d), Family::PlanarPower, d, {}, 2, 1.0, 1.0, 4.0};
}

inline MapDescriptor planar_chebyshev(int d) {
  if (d < 2) throw OutOfRange("degree must be at least 2");
  return {"cheb" + std::to_string(d), Family::PlanarChebyshev, d, {}, 2, 1.0, 1.0, 4.0};
}

inline MapDescriptor quadratic(double c, const std::string& name) {
  return {name, Family::Quadratic, 2, {c, 0.0}, 2, 1.0, 1.0, 4.0};
}

inline MapDescriptor zorich_power(int d) {
  if (d < 2) throw OutOfRange("degree must be at least 2");
  const double K = zorich_declared_dilatation();
  return {"zorich" + std::to_string(d), Family::ZorichPower, d, {}, 3, K, std::pow(K, -0.5), std::exp(4.0)};
}

inline const std::vector<std::string>& quadratic_presets() {
  static const std::vector<std::string> p{"quad:0", "quad:-1", "quad:-2", "quad:-10", "quad:0.25"};
  return p;
}

/// Presets used by the verification pipeline.
inline const std::vector<std::string>& builtin_presets() {
  static const std::vector<std::string> p{"power2", "power3", "cheb3", "quad:0", "quad:-1",
                                          "quad:-2", "quad:-10", "zorich2"};
  return p;
}

/// Resolves power<d>, cheb<d>, zorich<d> (2 <= d <= 9) and the quadratic presets.
inline MapDescriptor map_preset(const std::string& name) {
  auto degree = [&](const std::string& prefix) -> int {
    if (name.size() != prefix.size() + 1 || name.compare(0, prefix.size(), prefix) != 0) return 0;
    const char ch = name.back();
    return ch >= '2' && ch <= '9' ? ch - '0' : 0;
  };
  if (int d = degree("power")) return planar_power(d);
  if (int d = degree("cheb")) return planar_chebyshev(d);
  if (int d = degree("zorich")) return zorich_power(d);
  static const std::vector<std::pair<std::string, double>> quads{
      {"quad:0", 0.0}, {"quad:-1", -1.0}, {"quad:-2", -2.0}, {"quad:-10", -10.0}, {"quad:0.25", 0.25}};
  for (const auto& [n, c] : quads)
    if (n == name) return quadratic(c, n);
  throw InputError("unknown map preset '" + name + "'");
}

inline std::complex<double> ipow(std::complex<double> z, int d) {
  std::complex<double> r{1.0, 0.0};
  for (int i = 0; i < d; ++i) r *= z;
  return r;
}

/// T_d by the three-term recurrence, which is the polynomial with T_d((w + 1/w)/2) = (w^d + w^-d)/2.
inline std::complex<double> chebyshev(std::complex<double> z, int d) {
  std::complex<double> a{1.0, 0.0}, b = z;
  for (int k = 1; k < d; ++k) {
    const auto c = 2.0 * z * b - a;
    a = b;
    b = c;
  }
  return b;
}

inline std::complex<double> apply_planar(const MapDescriptor& m, std::complex<double> z) {
  switch (m.family) {
    case Family::PlanarPower: return ipow(z, m.degree);
    case Family::PlanarChebyshev: return chebyshev(z, m.degree);
    case Family::Quadratic: return z * z + m.c;
    case Family::ZorichPower: break;
  }
  throw PreconditionError("not a planar family");
}

/// Z o A^steps o Z^{-1}: one evaluation of the steps-fold iterate. Requires y != 0.
inline Vec3d apply_zorich(const MapDescriptor& m, const Vec3d& y, int steps = 1) {
  const auto x = zorich_inverse(y).embed();
  return zorich(zorich_dilation(x, std::pow(static_cast<double>(m.degree), steps)));
}

inline ExtendedPoint apply(const MapDescriptor& m, const ExtendedPoint& x) {
  if (x.dim() != m.dim) throw DimensionMismatch(m.name + " acts on dimension " + std::to_string(m.dim));
  if (x.is_infinite()) return x;
  if (m.family == Family::ZorichPower) {
    const Vec3d y{x[0], x[1], x[2]};
    if (std::hypot(y[0], y[1], y[2]) == 0.0) return ExtendedPoint::origin(3);
    const auto f = apply_zorich(m, y);
    if (!std::isfinite(f[0]) || !std::isfinite(f[1]) || !std::isfinite(f[2])) return ExtendedPoint::infinity(3);
    return {f[0], f[1], f[2]};
  }
  const auto w = apply_planar(m, {x[0], x[1]});
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return ExtendedPoint::infinity(2);
  return {w.real(), w.imag()};
}

/// The steps-fold iterate in one evaluation (one chart round trip for Zorich maps).
inline ExtendedPoint apply_composed(const MapDescriptor& m, const ExtendedPoint& x, int steps) {
  if (m.family != Family::ZorichPower || x.is_infinite() || std::hypot(x[0], x[1], x[2]) == 0.0) {
    ExtendedPoint y = x;
    for (int i = 0; i < steps; ++i) y = apply(m, y);
    return y;
  }
  const auto f = apply_zorich(m, {x[0], x[1], x[2]}, steps);
  if (!std::isfinite(f[0]) || !std::isfinite(f[1]) || !std::isfinite(f[2])) return ExtendedPoint::infinity(3);
  return {f[0], f[1], f[2]};
}

enum class OrbitLabel { Escaped, Bounded, Undecided };

inline const char* to_string(OrbitLabel l) {
  switch (l) {
    case OrbitLabel::Escaped: return "escaped";
    case OrbitLabel::Bounded: return "bounded";
    case OrbitLabel::Undecided: return "undecided";
  }
  return "?";
}

struct OrbitClassification {
  OrbitLabel label = OrbitLabel::Undecided;
  int iterations_used = 0;
  ExtendedPoint final_point;
};

/// Escaped once |f^k(x)| > escape_radius, bounded if that never happens within max_iter.
inline OrbitClassification classify_orbit(const MapDescriptor& m, const ExtendedPoint& x, int max_iter,
                                          double escape_radius = 0.0) {
  const double R = escape_radius > 0.0 ? escape_radius : m.escape_radius;
  OrbitClassification out;
  ExtendedPoint y = x;
  for (int k = 0; k <= max_iter; ++k) {
    if (y.is_infinite() || y.norm() > R) {
      out.label = OrbitLabel::Escaped;
      out.iterations_used = k;
      out.final_point = y;
      return out;
    }
    if (k < max_iter) y = apply(m, y);
  }
  out.label = OrbitLabel::Bounded;
  out.iterations_used = max_iter;
  out.final_point = y;
  return out;
}

}  // namespace uniperf::uqr
