#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uniperf/error.hpp"
#include "uniperf/fractal.hpp"
#include "uniperf/modulus/solver.hpp"
#include "uniperf/perfectness.hpp"
#include "uniperf/point_cloud.hpp"

namespace uniperf::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchema = 1;

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// ---------------------------------------------------------------------------
// Point cloud CSV: "# key=value" metadata lines, then one point per line.

inline void write_cloud(std::ostream& os, const PointCloud& c) {
  os << "# dim=" << c.dim << '\n';
  for (const auto& [k, v] : c.meta) os << "# " << k << '=' << v << '\n';
  for (const auto& p : c.points) {
    if (p.is_infinite()) throw PreconditionError("cloud points must be finite");
    for (int k = 0; k < c.dim; ++k) {
      if (k) os << ',';
      os << format_double(p[k]);
    }
    os << '\n';
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline PointCloud read_cloud(std::istream& is) {
  PointCloud c;
  int declared = 0, line_no = 0;
  bool seen_points = false;
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    const auto s = detail::trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      if (seen_points) throw InputError("metadata after the first point", line_no);
      const auto body = detail::trim(s.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos || eq == 0) throw InputError("metadata line is not key=value", line_no);
      const std::string key(detail::trim(body.substr(0, eq))), value(detail::trim(body.substr(eq + 1)));
      if (key == "dim") {
        int d = 0;
        const auto r = std::from_chars(value.data(), value.data() + value.size(), d);
        if (r.ec != std::errc() || r.ptr != value.data() + value.size() || d < 1 || d > ExtendedPoint::kMaxDim)
          throw InputError("bad dim '" + value + "'", line_no);
        declared = d;
      } else {
        c.set(key, value);
      }
      continue;
    }
    double x[ExtendedPoint::kMaxDim];
    int n = 0;
    std::size_t pos = 0;
    while (true) {
      const auto comma = s.find(',', pos);
      const auto field = detail::trim(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      if (n == ExtendedPoint::kMaxDim) throw InputError("too many fields", line_no);
      const auto r = std::from_chars(field.data(), field.data() + field.size(), x[n]);
      if (field.empty() || r.ec != std::errc() || r.ptr != field.data() + field.size())
        throw InputError("bad number '" + std::string(field) + "'", line_no);
      if (!std::isfinite(x[n])) throw InputError("non-finite coordinate", line_no);
      ++n;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (!seen_points) {
      if (declared && n != declared) throw InputError("point has " + std::to_string(n) + " fields, dim is " + std::to_string(declared), line_no);
      c.dim = n;
      seen_points = true;
    } else if (n != c.dim) {
      throw InputError("point has " + std::to_string(n) + " fields, expected " + std::to_string(c.dim), line_no);
    }
    c.points.emplace_back(std::span<const double>(x, static_cast<std::size_t>(n)));
  }
  if (!seen_points) throw InputError("cloud file has no points", line_no);
  return c;
}

// ---------------------------------------------------------------------------
// JSON

inline Json point_json(const ExtendedPoint& p) {
  if (p.is_infinite()) return "inf";
  Json a = Json::array();
  for (int k = 0; k < p.dim(); ++k) a.push_back(p[k]);
  return a;
}

inline Json meta_json(const PointCloud& c) {
  Json m = Json::object();
  for (const auto& [k, v] : c.meta) m[k] = v;
  return m;
}

inline Json to_json(const SeparationWitness& w) {
  return Json{{"center", point_json(w.ring.center)},
              {"inner", w.ring.inner},
              {"outer", w.ring.outer},
              {"metric", to_string(w.ring.metric)},
              {"modulus", w.modulus},
              {"floored", w.floored},
              {"points_inside", w.side_inner.size()},
              {"points_outside", w.side_outer.size()}};
}

inline Json to_json(const PerfectnessReport& r) {
  Json j;
  j["alpha_hat"] = r.alpha_hat;
  j["alpha_euclidean"] = r.alpha_euclidean;
  j["alpha_chordal"] = r.alpha_chordal;
  j["epsilon"] = r.epsilon;
  j["epsilon_source"] = r.epsilon_source;
  j["resolution_caveat"] = r.resolution_caveat;
  j["points"] = r.points;
  j["dim"] = r.dim;
  Json w = Json::array();
  for (const auto& x : r.witnesses) w.push_back(to_json(x));
  j["witnesses"] = std::move(w);
  Json s = Json::array();
  for (const auto& [f, a] : r.refinement) s.push_back({{"floor", f}, {"alpha", a}});
  j["refinement"] = std::move(s);
  const auto& g = r.per_point_gap_stats;
  j["per_point_gap_stats"] = {{"count", g.count}, {"min", g.min},   {"median", g.median}, {"p90", g.p90},
                              {"p99", g.p99},     {"max", g.max},   {"mean", g.mean}};
  return j;
}

inline Json to_json(const DimensionFit& f) {
  return Json{{"label", f.label}, {"epsilons", f.epsilons}, {"counts", f.counts}, {"slope", f.slope},
              {"intercept", f.intercept}, {"r2", f.r2}, {"flagged", f.flagged}};
}

inline Json to_json(const ContentCheck& c) {
  return Json{{"beta", c.beta},
              {"conversion", c.conversion},
              {"radii", c.radii},
              {"per_radius_min", c.per_radius_min},
              {"min_ratio", c.min_ratio},
              {"spread", c.spread},
              {"stable", c.stable}};
}

inline Json to_json(const modulus::CapacityResult& r) {
  Json j{{"capacity", r.capacity},   {"lower_bound", r.lower_bound}, {"n", r.n},
         {"p", r.p},                 {"iterations", r.iterations},   {"rounds", r.rounds},
         {"paths", r.paths},         {"certified_slack", r.certified_slack}, {"connected", r.connected}};
  j["modulus"] = std::isfinite(r.modulus) ? Json(r.modulus) : Json("inf");
  return j;
}

/// Report envelope: schema version, command name and the resolved configuration.
inline Json envelope(const std::string& command, Json config) {
  return Json{{"schema", kSchema}, {"command", command}, {"config", std::move(config)}};
}

// ---------------------------------------------------------------------------
// SVG

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Affine map from a data rectangle onto a square canvas, y pointing up.
struct Frame {
  double x0, y0, scale, size, pad;
  double sx(double x) const { return pad + (x - x0) * scale; }
  double sy(double y) const { return size - pad - (y - y0) * scale; }
};

inline Frame frame_for(double xmin, double xmax, double ymin, double ymax, double size = 600.0, double pad = 20.0) {
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  return {cx - 0.5 * span, cy - 0.5 * span, (size - 2.0 * pad) / span, size, pad};
}

/// Boundary of the chordal ball of radius u about a, traced in the plane of the first two
/// coordinates. Empty when the sphere passes through infinity.
inline std::vector<std::array<double, 2>> chordal_circle(const ExtendedPoint& a, double u, int samples = 180) {
  std::vector<std::array<double, 2>> out;
  const double a2 = a.norm2(), k = u * u * (1.0 + a2);
  if (k >= 1.0) return out;
  for (int i = 0; i <= samples; ++i) {
    const double th = 2.0 * std::numbers::pi * i / samples;
    const double ex = std::cos(th), ey = std::sin(th), ae = a[0] * ex + a[1] * ey;
    // |t|^2 = k (1 + |a + t e|^2) along the ray a + t e.
    const double A = 1.0 - k, B = -2.0 * k * ae, C = -k * (1.0 + a2);
    const double t = (-B + std::sqrt(B * B - 4.0 * A * C)) / (2.0 * A);
    out.push_back({a[0] + t * ex, a[1] + t * ey});
  }
  return out;
}

}  // namespace detail

/// Cloud (orthographic projection to the first two axes in 3-d) with witness annuli.
inline std::string cloud_svg(const PointCloud& c, const std::vector<SeparationWitness>& witnesses) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& p : c.points) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    const double y = c.dim > 1 ? p[1] : 0.0;
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (c.points.empty()) xmin = ymin = -1.0, xmax = ymax = 1.0;
  const auto F = detail::frame_for(xmin, xmax, ymin, ymax);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n";
  os << "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  if (c.dim == 3) os << "<text x=\"8\" y=\"14\" font-size=\"11\">orthographic projection (x1, x2)</text>\n";
  os << "<g fill=\"black\">\n";
  for (const auto& p : c.points)
    os << "<circle cx=\"" << detail::num(F.sx(p[0])) << "\" cy=\"" << detail::num(F.sy(c.dim > 1 ? p[1] : 0.0))
       << "\" r=\"1\"/>\n";
  os << "</g>\n";
  const char* colour[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};
  for (std::size_t i = 0; i < witnesses.size(); ++i) {
    const auto& w = witnesses[i];
    const auto& a = w.ring.center;
    if (a.is_infinite() || a.dim() < 2) continue;
    const char* col = colour[i % 5];
    for (double r : {w.ring.inner, w.ring.outer}) {
      if (w.ring.metric == Metric::Euclidean) {
        os << "<circle cx=\"" << detail::num(F.sx(a[0])) << "\" cy=\"" << detail::num(F.sy(a[1])) << "\" r=\""
           << detail::num(r * F.scale) << "\" fill=\"none\" stroke=\"" << col << "\"/>\n";
      } else {
        const auto pts = detail::chordal_circle(a, r);
        if (pts.empty()) continue;
        os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-dasharray=\"4 2\" points=\"";
        for (std::size_t k = 0; k < pts.size(); ++k)
          os << (k ? " " : "") << detail::num(F.sx(pts[k][0])) << ',' << detail::num(F.sy(pts[k][1]));
        os << "\"/>\n";
      }
    }
  }
  os << "</svg>\n";
  return os.str();
}

/// log N(eps) against log(1/eps) with the fitted line.
inline std::string loglog_svg(const DimensionFit& f) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < f.epsilons.size(); ++i) {
    x.push_back(-std::log(f.epsilons[i]));
    y.push_back(std::log(static_cast<double>(f.counts[i])));
  }
  const double xmin = *std::min_element(x.begin(), x.end()), xmax = *std::max_element(x.begin(), x.end());
  const double ymin = *std::min_element(y.begin(), y.end()), ymax = *std::max_element(y.begin(), y.end());
  const double W = 600, H = 400, pad = 50;
  const double sx = (W - 2 * pad) / std::max(xmax - xmin, 1e-12), sy = (H - 2 * pad) / std::max(ymax - ymin, 1e-12);
  auto px = [&](double v) { return pad + (v - xmin) * sx; };
  auto py = [&](double v) { return H - pad - (v - ymin) * sy; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"400\" viewBox=\"0 0 600 400\">\n";
  os << "<rect width=\"600\" height=\"400\" fill=\"white\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" font-size=\"12\" text-anchor=\"middle\">log(1/eps)</text>\n";
  os << "<text x=\"14\" y=\"" << H / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 " << H / 2
     << ")\" text-anchor=\"middle\">log N(eps)</text>\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    os << "<circle cx=\"" << detail::num(px(x[i])) << "\" cy=\"" << detail::num(py(y[i])) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  os << "<line x1=\"" << detail::num(px(xmin)) << "\" y1=\"" << detail::num(py(f.intercept + f.slope * xmin)) << "\" x2=\""
     << detail::num(px(xmax)) << "\" y2=\"" << detail::num(py(f.intercept + f.slope * xmax))
     << "\" stroke=\"#d62728\"/>\n";
  os << "<text x=\"" << pad + 10 << "\" y=\"" << pad << "\" font-size=\"12\">" << f.label << " " << detail::num(f.slope)
     << " (r2 " << detail::num(f.r2) << (f.flagged ? ", flagged" : "") << ")</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace uniperf::io
