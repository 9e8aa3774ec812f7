#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "uniperf/error.hpp"
#include "uniperf/point.hpp"
#include "uniperf/uqr/maps.hpp"

namespace uniperf::uqr {

struct HolderProbe {
  std::vector<double> radii;
  std::vector<double> image_diameters;
  double exponent = 0.0;  // least-squares slope of log d(f(B)) against log r
};

namespace detail {

inline Vec3d to_vec3(const ExtendedPoint& p) { return {p[0], p[1], p.dim() > 2 ? p[2] : 0.0}; }

inline Vec3d eval(const MapDescriptor& m, const Vec3d& x) {
  const auto y = m.dim == 2 ? apply(m, ExtendedPoint{x[0], x[1]}) : apply(m, ExtendedPoint{x[0], x[1], x[2]});
  if (y.is_infinite()) throw PreconditionError("probe left the finite region of " + m.name);
  return to_vec3(y);
}

/// Points of the sphere |x - c| = r: a uniform circle in the plane, a Fibonacci lattice in space.
inline std::vector<Vec3d> sphere_samples(const Vec3d& c, double r, int dim, int count) {
  std::vector<Vec3d> out;
  out.reserve(static_cast<std::size_t>(count));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    if (dim == 2) {
      const double a = 2.0 * std::numbers::pi * i / count;
      out.push_back({c[0] + r * std::cos(a), c[1] + r * std::sin(a), 0.0});
    } else {
      const double z = 1.0 - (2.0 * i + 1.0) / count, s = std::sqrt(1.0 - z * z), a = golden * i;
      out.push_back({c[0] + r * s * std::cos(a), c[1] + r * s * std::sin(a), c[2] + r * z});
    }
  }
  return out;
}

inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

/// d(f(B(center, r))) over a strictly decreasing radius list. f is open, so the image of the
/// closed ball has the diameter of the image of its boundary sphere, which is sampled densely.
inline HolderProbe holder_scaling_probe(const MapDescriptor& m, const ExtendedPoint& center,
                                        const std::vector<double>& radii, int samples = 0) {
  if (center.dim() != m.dim || center.is_infinite()) throw DimensionMismatch("probe centre must be a finite point of the map's space");
  if (radii.size() < 2) throw PreconditionError("need at least two radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw OutOfRange("radii must be positive");
    if (i && !(radii[i] < radii[i - 1])) throw PreconditionError("radii must be strictly decreasing");
  }
  if (samples <= 0) samples = m.dim == 2 ? 720 : 1500;
  HolderProbe p;
  p.radii = radii;
  std::vector<double> lx, ly;
  const auto c = detail::to_vec3(center);
  for (double r : radii) {
    std::vector<Vec3d> img;
    for (const auto& x : detail::sphere_samples(c, r, m.dim, samples)) img.push_back(detail::eval(m, x));
    double d2 = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i)
      for (std::size_t j = i + 1; j < img.size(); ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += (img[i][k] - img[j][k]) * (img[i][k] - img[j][k]);
        d2 = std::max(d2, s);
      }
    p.image_diameters.push_back(std::sqrt(d2));
    lx.push_back(std::log(r));
    ly.push_back(0.5 * std::log(d2));
  }
  p.exponent = detail::slope(lx, ly);
  return p;
}

struct DilatationSample {
  ExtendedPoint point;
  double outer = 0.0;  // |f'|^n / J_f
  double inner = 0.0;  // J_f / l(f')^n
  bool skipped = false;
  std::string diagnostic;
};

struct DilatationProbe {
  double K = 1.0;  // max over kept samples of max(outer, inner)
  std::vector<DilatationSample> samples;
  std::size_t skipped = 0;
};

/// Finite-difference dilatation over sample points. Samples on or near the branch set
/// (vanishing or reversed Jacobian, or a Zorich chart within 4h of a beam edge) are skipped.
inline DilatationProbe dilatation_probe(const MapDescriptor& m, const std::vector<ExtendedPoint>& points, double h) {
  if (!(h > 0.0)) throw OutOfRange("step must be positive");
  DilatationProbe out;
  const VecFn F = [&](const Vec3d& x) { return detail::eval(m, x); };
  for (const auto& p : points) {
    if (p.dim() != m.dim || p.is_infinite()) throw DimensionMismatch("sample must be a finite point of the map's space");
    DilatationSample s;
    s.point = p;
    const auto x = detail::to_vec3(p);
    if (m.family == Family::ZorichPower) {
      const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
      if (r2 == 0.0) {
        s.skipped = true;
        s.diagnostic = "origin";
      } else {
        const auto pre = zorich_inverse(x).embed();
        const double scale = std::sqrt(r2);
        // A chart step of h moves the image by about h |y|, so compare in chart units.
        if (beam_edge_distance(pre) < 4.0 * h / scale || beam_edge_distance(zorich_dilation(pre, m.degree)) < 4.0 * h * m.degree / scale) {
          s.skipped = true;
          s.diagnostic = "beam edge (branch set)";
        }
      }
    }
    if (!s.skipped) {
      const auto d = distortion(jacobian(F, x, m.dim, h));
      if (!(d.jacobian > 0.0) || !(d.min_stretch > 1e-8 * d.max_stretch)) {
        s.skipped = true;
        s.diagnostic = "singular or orientation-reversing Jacobian (branch point)";
      } else {
        s.outer = d.outer();
        s.inner = d.inner();
        out.K = std::max({out.K, s.outer, s.inner});
      }
    }
    if (s.skipped) ++out.skipped;
    out.samples.push_back(std::move(s));
  }
  return out;
}

}  // namespace uniperf::uqr
