#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <vector>

#include "uniperf/fractal.hpp"
#include "uniperf/inequalities.hpp"
#include "uniperf/io.hpp"
#include "uniperf/modulus/capacity.hpp"
#include "uniperf/modulus/quasihyperbolic.hpp"
#include "uniperf/perfectness.hpp"
#include "uniperf/sphere_geometry.hpp"
#include "uniperf/uqr/julia.hpp"

namespace uniperf {

/// Depth D of the perfectness stability test (D against 2D).
inline int perfectness_depth(const uqr::MapDescriptor& m) {
  if (m.family == uqr::Family::ZorichPower) return 6;
  return m.degree == 2 ? 6 : 4;
}

/// Depth of the dimension fit: enough for at least four dyadic scales above the sampling scale.
inline int dimension_depth(const uqr::MapDescriptor& m) {
  if (m.family == uqr::Family::ZorichPower) return 14;
  return m.degree == 2 ? 16 : 10;
}

/// Radii extent/2, extent/4, ... down to ten sampling scales, at most `count` of them.
inline std::vector<double> content_radii(const PointCloud& c, int count = 6) {
  const double ext = detail::extent(c), res = detail::resolution(c);
  std::vector<double> r;
  for (double x = 0.5 * ext; x >= 10.0 * res && static_cast<int>(r.size()) < count; x *= 0.5) r.push_back(x);
  return r;
}

struct VerifyConfig {
  std::vector<std::string> presets;  // empty: every built-in preset
  std::uint64_t seed = 1;
  int cases = 50;  // per inequality suite; 0 skips the suites
  int grid = 0;    // modulus stage resolution; 0 uses each stage's default
  double stability_tol = 0.10;
  double alpha_bound = 5.0;
  double dimension_floor = 0.3;
  double r2_floor = 0.98;
  double modulus_tol = 0.05;
};

/// Smallest resolution at which the modulus stages are trusted.
inline constexpr int kMinGrid = 32;

struct StageResult {
  std::string name;
  bool pass = false;
  io::Json measured = io::Json::object();
  io::Json thresholds = io::Json::object();
  std::string note;
};

struct VerificationSummary {
  VerifyConfig config;
  std::vector<StageResult> stages;
  bool pass = false;
};

namespace detail {

inline StageResult perfectness_stage(const uqr::MapDescriptor& m, const VerifyConfig& cfg) {
  StageResult s;
  s.name = "perfectness:" + m.name;
  const int D = perfectness_depth(m);
  AnalyzeConfig ac;
  ac.seed = cfg.seed;
  const auto a = analyze(uqr::sample_julia_depth(m, D, cfg.seed), ac);
  const auto b = analyze(uqr::sample_julia_depth(m, 2 * D, cfg.seed), ac);
  const double rel = std::abs(b.alpha_hat - a.alpha_hat) / a.alpha_hat;
  s.measured = {{"depth", D},
                {"alpha_hat_D", a.alpha_hat},
                {"alpha_hat_2D", b.alpha_hat},
                {"relative_change", rel},
                {"epsilon_D", a.epsilon},
                {"epsilon_2D", b.epsilon},
                {"resolution_caveat", a.resolution_caveat || b.resolution_caveat}};
  s.thresholds = {{"relative_change_max", cfg.stability_tol}, {"alpha_hat_max", cfg.alpha_bound}};
  s.pass = a.alpha_hat > 0.0 && rel <= cfg.stability_tol && std::max(a.alpha_hat, b.alpha_hat) <= cfg.alpha_bound;
  return s;
}

inline StageResult dimension_stage(const uqr::MapDescriptor& m, const VerifyConfig& cfg) {
  StageResult s;
  s.name = "dimension:" + m.name;
  const auto cloud = uqr::sample_julia_depth(m, dimension_depth(m), cfg.seed);
  const auto fit = fit_dimension(cloud);
  ContentOptions co;
  co.radii = content_radii(cloud);
  co.seed = cfg.seed;
  const auto cc = content_lower_bound_check(cloud, std::min(std::max(fit.slope, 1e-3), static_cast<double>(cloud.dim)), co);
  s.measured = {{"depth", dimension_depth(m)},
                {"points", cloud.size()},
                {"fit", io::to_json(fit)},
                {"content", io::to_json(cc)}};
  s.thresholds = {{"slope_min", cfg.dimension_floor}, {"r2_min", cfg.r2_floor}, {"content_spread_max", 4.0}};
  s.pass = fit.slope >= cfg.dimension_floor && fit.r2 >= cfg.r2_floor && cc.stable;
  return s;
}

inline StageResult suite_stage(InequalitySuite (*run)(TauTable&, const InequalityOptions&), TauTable& tau,
                               const VerifyConfig& cfg, const std::string& name) {
  StageResult s;
  s.name = "inequality:" + name;
  InequalityOptions o;
  o.cases = cfg.cases;
  o.seed = cfg.seed;
  if (cfg.grid > 0) o.resolution = cfg.grid;
  s.thresholds = {{"violations_max", 0}, {"slack", o.slack}, {"resolution_min", kMinGrid}};
  if (o.resolution < kMinGrid) {
    s.note = "grid too coarse for the modulus solver";
    s.measured = {{"resolution", o.resolution}};
    return s;
  }
  const auto suite = run(tau, o);
  s.measured = {{"resolution", o.resolution}, {"cases", suite.cases.size()}, {"violations", suite.violations},
                {"min_ratio", suite.min_ratio}};
  s.pass = suite.violations == 0;
  return s;
}

inline StageResult ring_stage(const VerifyConfig& cfg) {
  StageResult s;
  s.name = "modulus:ring";
  modulus::RingOptions o;
  o.n = 2;
  o.resolution = cfg.grid > 0 ? cfg.grid : modulus::default_resolution(2);
  s.thresholds = {{"relative_error_max", cfg.modulus_tol}, {"resolution_min", kMinGrid}};
  if (o.resolution < kMinGrid) {
    s.note = "grid too coarse for the modulus solver";
    s.measured = {{"resolution", o.resolution}};
    return s;
  }
  const double R = std::exp(1.0);
  const auto r = modulus::ring_capacity({modulus::RingPrimitive::ball({}, 1.0)}, {modulus::RingPrimitive::exterior({}, R)}, o);
  const double exact = sphere_surface_area(2) * std::pow(std::log(R), -1.0);
  const double err = std::abs(r.capacity - exact) / exact;
  s.measured = {{"resolution", o.resolution}, {"capacity", r.capacity}, {"exact", exact}, {"relative_error", err}};
  s.pass = err <= cfg.modulus_tol;
  return s;
}

inline StageResult qh_stage(const VerifyConfig& cfg) {
  StageResult s;
  s.name = "modulus:quasihyperbolic";
  modulus::QhOptions o;
  o.resolution = cfg.grid > 0 ? cfg.grid : 256;
  s.thresholds = {{"relative_error_max", cfg.modulus_tol}, {"resolution_min", kMinGrid}};
  if (o.resolution < kMinGrid) {
    s.note = "grid too coarse for the modulus solver";
    s.measured = {{"resolution", o.resolution}};
    return s;
  }
  const auto G = modulus::QhDomain::ball({}, 1.0, 2);
  const double k = modulus::quasihyperbolic_distance(G, ExtendedPoint{0.0, 0.0}, ExtendedPoint{0.9, 0.0}, o);
  const double exact = std::log(10.0);
  const double err = std::abs(k - exact) / exact;
  s.measured = {{"resolution", o.resolution}, {"distance", k}, {"exact", exact}, {"relative_error", err}};
  s.pass = err <= cfg.modulus_tol;
  return s;
}

/// Runs a stage, turning a library error into a failed stage with the message as note.
template <class Fn>
StageResult guarded(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    StageResult s;
    s.name = name;
    s.note = std::string("error: ") + e.what();
    return s;
  }
}

}  // namespace detail

/// The acceptance pipeline: perfectness stability and dimension for each preset, the two
/// inequality suites and the modulus resolution checks. Deterministic for a fixed config.
inline VerificationSummary run_verify(const VerifyConfig& cfg) {
  VerificationSummary out;
  out.config = cfg;
  const auto& names = cfg.presets.empty() ? uqr::builtin_presets() : cfg.presets;
  std::vector<uqr::MapDescriptor> maps;
  for (const auto& n : names) maps.push_back(uqr::map_preset(n));
  for (const auto& m : maps)
    out.stages.push_back(detail::guarded("perfectness:" + m.name, [&] { return detail::perfectness_stage(m, cfg); }));
  for (const auto& m : maps)
    out.stages.push_back(detail::guarded("dimension:" + m.name, [&] { return detail::dimension_stage(m, cfg); }));
  if (cfg.cases > 0) {
    TauTable tau(2);
    out.stages.push_back(detail::guarded("inequality:sphere_ring", [&] {
      return detail::suite_stage(&sphere_ring_suite, tau, cfg, "sphere_ring");
    }));
    out.stages.push_back(detail::guarded("inequality:planar_continua", [&] {
      return detail::suite_stage(&planar_continua_suite, tau, cfg, "planar_continua");
    }));
  }
  out.stages.push_back(detail::guarded("modulus:ring", [&] { return detail::ring_stage(cfg); }));
  out.stages.push_back(detail::guarded("modulus:quasihyperbolic", [&] { return detail::qh_stage(cfg); }));
  out.pass = true;
  for (const auto& s : out.stages) out.pass = out.pass && s.pass;
  return out;
}

inline io::Json verify_config_json(const VerifyConfig& c) {
  io::Json presets = io::Json::array();
  for (const auto& p : c.presets.empty() ? uqr::builtin_presets() : c.presets) presets.push_back(p);
  return {{"presets", presets},         {"seed", c.seed},
          {"cases", c.cases},           {"grid", c.grid},
          {"stability_tol", c.stability_tol}, {"alpha_bound", c.alpha_bound},
          {"dimension_floor", c.dimension_floor}, {"r2_floor", c.r2_floor},
          {"modulus_tol", c.modulus_tol}};
}

inline io::Json to_json(const VerificationSummary& v) {
  auto j = io::envelope("verify", verify_config_json(v.config));
  io::Json stages = io::Json::array();
  for (const auto& s : v.stages) {
    io::Json e{{"name", s.name}, {"pass", s.pass}, {"measured", s.measured}, {"thresholds", s.thresholds}};
    if (!s.note.empty()) e["note"] = s.note;
    stages.push_back(std::move(e));
  }
  j["stages"] = std::move(stages);
  j["pass"] = v.pass;
  return j;
}

}  // namespace uniperf
