// uniperf: generate Julia set samples, analyse them, and run the verification pipeline.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "uniperf/fractal.hpp"
#include "uniperf/io.hpp"
#include "uniperf/modulus/capacity.hpp"
#include "uniperf/modulus/quasihyperbolic.hpp"
#include "uniperf/perfectness.hpp"
#include "uniperf/uqr/julia.hpp"
#include "uniperf/verify.hpp"

namespace {

using uniperf::io::Json;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

/// Explicit path, else $UNIPERF_OUT_DIR/<fallback>, else empty (stdout).
std::string output_path(const std::string& explicit_path, const std::string& fallback) {
  if (!explicit_path.empty()) return explicit_path;
  if (const char* dir = std::getenv("UNIPERF_OUT_DIR"); dir && *dir) {
    std::string name = fallback;
    for (char& c : name)
      if (c == ':') c = '_';
    return (std::filesystem::path(dir) / name).string();
  }
  return {};
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw uniperf::InputError("cannot write '" + path + "'");
  os << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

uniperf::PointCloud load_cloud(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw uniperf::InputError("cannot open '" + path + "'");
  try {
    return uniperf::io::read_cloud(is);
  } catch (const uniperf::InputError& e) {
    throw uniperf::InputError(path + ": " + e.what());
  }
}

uniperf::modulus::Vec3 parse_point(const std::string& s, int n) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw uniperf::InputError("bad coordinate '" + tok + "'");
    }
  }
  uniperf::modulus::Vec3 p{};
  if (v.size() == 1) {
    p[0] = v[0];  // a scalar t means t e1
  } else if (static_cast<int>(v.size()) == n) {
    for (int k = 0; k < n; ++k) p[k] = v[static_cast<std::size_t>(k)];
  } else {
    throw uniperf::InputError("point '" + s + "' needs 1 or " + std::to_string(n) + " coordinates");
  }
  return p;
}

uniperf::ExtendedPoint to_point(const uniperf::modulus::Vec3& v, int n) {
  return n == 2 ? uniperf::ExtendedPoint{v[0], v[1]} : uniperf::ExtendedPoint{v[0], v[1], v[2]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uniform perfectness and dimension of Julia sets of uniformly quasiregular maps"};
  app.require_subcommand(1);

  // julia
  std::string j_map, j_method, j_out;
  int j_budget = 10000, j_depth = 0;
  std::uint64_t j_seed = 1;
  auto* julia = app.add_subcommand("julia", "Sample a Julia set to a CSV point cloud");
  julia->add_option("--map", j_map, "Preset: power<d>, cheb<d>, zorich<d>, quad:0, quad:-1, quad:-2, quad:-10, quad:0.25")->required();
  julia->add_option("--budget", j_budget, "Number of points")->capture_default_str();
  julia->add_option("--seed", j_seed, "Random seed")->capture_default_str();
  julia->add_option("--method", j_method, "inverse_iteration or ray_bisection (default depends on the map)");
  julia->add_option("--depth", j_depth, "Depth-k sample (preimage tree or ray lattice) instead of a budget");
  julia->add_option("--out", j_out, "Output CSV");

  // analyze
  std::string a_in, a_out, a_svg;
  uniperf::AnalyzeConfig a_cfg;
  auto* analyze = app.add_subcommand("analyze", "Estimate the uniform perfectness constant of a cloud");
  analyze->add_option("cloud", a_in, "Point cloud CSV")->required();
  analyze->add_option("--epsilon", a_cfg.epsilon, "Resolution floor (default: twice the sampling scale)");
  analyze->add_option("--budget", a_cfg.search_budget, "Centre search evaluations")->capture_default_str();
  analyze->add_option("--seed", a_cfg.seed, "Centre search seed")->capture_default_str();
  analyze->add_option("--top-k", a_cfg.top_k, "Witnesses to report")->capture_default_str();
  analyze->add_option("--levels", a_cfg.refinement_levels, "Refinement series length")->capture_default_str();
  analyze->add_option("--out", a_out, "Report JSON");
  analyze->add_option("--svg", a_svg, "Cloud and witness plot");

  // modulus
  std::string m_ring, m_out;
  int m_n = 2, m_grid = 0;
  auto* mod = app.add_subcommand("modulus", "Discrete capacity of a round ring r < |x| < R");
  mod->add_option("--ring", m_ring, "r:R")->required();
  mod->add_option("--n", m_n, "Dimension (2 or 3)")->capture_default_str();
  mod->add_option("--grid", m_grid, "Cells across the box (default 256 for n = 2, 96 for n = 3)");
  mod->add_option("--out", m_out, "Result JSON");

  // tau
  std::vector<double> t_s;
  int t_n = 2;
  uniperf::modulus::TauOptions t_opt;
  std::string t_out;
  auto* tau = app.add_subcommand("tau", "Teichmuller capacity estimates");
  tau->add_option("--s", t_s, "Comma-separated s values")->required()->delimiter(',');
  tau->add_option("--n", t_n, "Dimension (2 or 3)")->capture_default_str();
  tau->add_option("--grid", t_opt.resolution, "Angular resolution")->capture_default_str();
  tau->add_option("--box-scale", t_opt.box_scale, "Truncation radius in units of max(1, s)")->capture_default_str();
  tau->add_option("--out", t_out, "Result JSON");

  // qh
  bool q_ball = false, q_half = false;
  std::string q_from = "0", q_to, q_out;
  int q_n = 2, q_grid = 0;
  auto* qh = app.add_subcommand("qh", "Quasihyperbolic distance in the unit ball or the half-space x1 > 0");
  auto* q_ball_flag = qh->add_flag("--ball", q_ball, "G = B(0, 1)");
  qh->add_flag("--halfspace", q_half, "G = {x1 > 0}")->excludes(q_ball_flag);
  qh->add_option("--from", q_from, "Start point: t (meaning t e1) or comma-separated coordinates")->capture_default_str();
  qh->add_option("--to", q_to, "End point")->required();
  qh->add_option("--n", q_n, "Dimension (2 or 3)")->capture_default_str();
  qh->add_option("--grid", q_grid, "Cells along the longest side");
  qh->add_option("--out", q_out, "Result JSON");

  // dimension
  std::string d_in, d_out, d_svg;
  double d_eps_max = 0.0, d_eps_min = 0.0, d_beta = 0.0;
  int d_trials = 8;
  std::uint64_t d_seed = 1;
  auto* dim = app.add_subcommand("dimension", "Box-counting dimension fit and content check");
  dim->add_option("cloud", d_in, "Point cloud CSV")->required();
  dim->add_option("--eps-max", d_eps_max, "Largest box side (default: window from the extent)");
  dim->add_option("--eps-min", d_eps_min, "Smallest box side (default: twice the sampling scale)");
  dim->add_option("--beta", d_beta, "Content exponent (default: fitted slope)");
  dim->add_option("--trials", d_trials, "Content check centres per radius")->capture_default_str();
  dim->add_option("--seed", d_seed, "Content check seed")->capture_default_str();
  dim->add_option("--out", d_out, "Result JSON");
  dim->add_option("--svg", d_svg, "log-log plot");

  // verify
  uniperf::VerifyConfig v_cfg;
  std::string v_out;
  auto* verify = app.add_subcommand("verify", "Run the acceptance pipeline");
  verify->add_option("--preset", v_cfg.presets, "Restrict to these presets (repeatable)");
  verify->add_option("--seed", v_cfg.seed, "Seed for every randomised stage")->capture_default_str();
  verify->add_option("--cases", v_cfg.cases, "Cases per inequality suite (0 skips)")->capture_default_str();
  verify->add_option("--grid", v_cfg.grid, "Resolution of the modulus stages (0: stage defaults)")->capture_default_str();
  verify->add_option("--out", v_out, "Summary JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*julia) {
      const auto m = uniperf::uqr::map_preset(j_map);
      uniperf::PointCloud cloud;
      if (j_depth > 0) {
        cloud = uniperf::uqr::sample_julia_depth(m, j_depth, j_seed);
      } else {
        auto method = uniperf::uqr::default_method(m);
        if (j_method == "inverse_iteration") method = uniperf::uqr::SamplingMethod::InverseIteration;
        else if (j_method == "ray_bisection") method = uniperf::uqr::SamplingMethod::RayBisection;
        else if (!j_method.empty()) throw uniperf::InputError("unknown method '" + j_method + "'");
        cloud = uniperf::uqr::sample_julia(m, j_budget, method, j_seed);
      }
      std::ostringstream os;
      uniperf::io::write_cloud(os, cloud);
      emit(output_path(j_out, m.name + ".csv"), os.str());
      return 0;
    }
    if (*analyze) {
      const auto cloud = load_cloud(a_in);
      const auto rep = uniperf::analyze(cloud, a_cfg);
      auto j = uniperf::io::envelope("analyze", {{"cloud", a_in},
                                                 {"cloud_meta", uniperf::io::meta_json(cloud)},
                                                 {"epsilon", a_cfg.epsilon},
                                                 {"search_budget", a_cfg.search_budget},
                                                 {"seed", a_cfg.seed},
                                                 {"top_k", a_cfg.top_k},
                                                 {"refinement_levels", a_cfg.refinement_levels}});
      j["report"] = uniperf::io::to_json(rep);
      emit(output_path(a_out, "analyze.json"), dump(j));
      if (!a_svg.empty()) emit(a_svg, uniperf::io::cloud_svg(cloud, rep.witnesses));
      return 0;
    }
    if (*mod) {
      const auto colon = m_ring.find(':');
      if (colon == std::string::npos) throw uniperf::InputError("--ring expects r:R");
      double r = 0.0, R = 0.0;
      try {
        r = std::stod(m_ring.substr(0, colon));
        R = std::stod(m_ring.substr(colon + 1));
      } catch (const std::exception&) {
        throw uniperf::InputError("--ring expects r:R");
      }
      if (!(r > 0.0) || !(R > r)) throw uniperf::InputError("--ring needs 0 < r < R");
      uniperf::modulus::RingOptions o;
      o.n = m_n;
      o.resolution = m_grid;
      const auto res = uniperf::modulus::ring_capacity({uniperf::modulus::RingPrimitive::ball({}, r)},
                                                       {uniperf::modulus::RingPrimitive::exterior({}, R)}, o);
      auto j = uniperf::io::envelope("modulus", {{"ring", {r, R}}, {"n", m_n}, {"grid", m_grid}});
      j["result"] = uniperf::io::to_json(res);
      j["exact_capacity"] = uniperf::sphere_surface_area(m_n) * std::pow(std::log(R / r), 1.0 - m_n);
      j["exact_modulus"] = std::log(R / r);
      j["ring_modulus"] = uniperf::capacity_to_modulus(res.capacity, m_n);
      emit(output_path(m_out, "modulus.json"), dump(j));
      return 0;
    }
    if (*tau) {
      Json values = Json::array();
      double prev = 0.0;
      bool decreasing = true;
      for (std::size_t i = 0; i < t_s.size(); ++i) {
        const auto r = uniperf::modulus::tau_estimate({t_n, t_s[i]}, t_opt);
        values.push_back({{"s", t_s[i]}, {"tau", r.capacity}, {"lower_bound", r.lower_bound}});
        if (i && !(r.capacity < prev)) decreasing = false;
        prev = r.capacity;
      }
      auto j = uniperf::io::envelope("tau", {{"n", t_n}, {"s", t_s}, {"resolution", t_opt.resolution},
                                             {"box_scale", t_opt.box_scale}});
      j["values"] = std::move(values);
      j["strictly_decreasing"] = decreasing;
      emit(output_path(t_out, "tau.json"), dump(j));
      return 0;
    }
    if (*qh) {
      if (q_ball == q_half) throw uniperf::InputError("choose exactly one of --ball and --halfspace");
      if (q_n != 2 && q_n != 3) throw uniperf::InputError("--n must be 2 or 3");
      const auto a = parse_point(q_from, q_n), b = parse_point(q_to, q_n);
      const auto G = q_ball ? uniperf::modulus::QhDomain::ball({}, 1.0, q_n)
                            : uniperf::modulus::QhDomain::half_space(0, 0.0, q_n);
      uniperf::modulus::QhOptions o;
      o.resolution = q_grid;
      const double k = uniperf::modulus::quasihyperbolic_distance(G, to_point(a, q_n), to_point(b, q_n), o);
      auto j = uniperf::io::envelope("qh", {{"domain", q_ball ? "ball" : "halfspace"},
                                            {"from", uniperf::io::point_json(to_point(a, q_n))},
                                            {"to", uniperf::io::point_json(to_point(b, q_n))},
                                            {"n", q_n},
                                            {"grid", q_grid}});
      j["distance"] = k;
      emit(output_path(q_out, "qh.json"), dump(j));
      return 0;
    }
    if (*dim) {
      const auto cloud = load_cloud(d_in);
      auto window = uniperf::default_window(cloud);
      if (d_eps_max > 0.0) window.eps_max = d_eps_max;
      if (d_eps_min > 0.0) window.eps_min = d_eps_min;
      const auto fit = uniperf::fit_dimension(cloud, window);
      auto j = uniperf::io::envelope("dimension", {{"cloud", d_in},
                                                   {"cloud_meta", uniperf::io::meta_json(cloud)},
                                                   {"eps_max", window.eps_max},
                                                   {"eps_min", window.eps_min},
                                                   {"beta", d_beta},
                                                   {"trials", d_trials},
                                                   {"seed", d_seed}});
      j["fit"] = uniperf::io::to_json(fit);
      const double beta = d_beta > 0.0 ? d_beta : fit.slope;
      uniperf::ContentOptions co;
      co.radii = uniperf::content_radii(cloud);
      co.trials = d_trials;
      co.seed = d_seed;
      if (beta > 0.0 && !co.radii.empty())
        j["content"] = uniperf::io::to_json(uniperf::content_lower_bound_check(cloud, beta, co));
      emit(output_path(d_out, "dimension.json"), dump(j));
      if (!d_svg.empty()) emit(d_svg, uniperf::io::loglog_svg(fit));
      return 0;
    }
    if (*verify) {
      const auto summary = uniperf::run_verify(v_cfg);
      emit(output_path(v_out, "verify.json"), dump(uniperf::to_json(summary)));
      for (const auto& s : summary.stages)
        std::cerr << (s.pass ? "PASS " : "FAIL ") << s.name << (s.note.empty() ? "" : "  (" + s.note + ")") << '\n';
      std::cerr << (summary.pass ? "overall PASS" : "overall FAIL") << '\n';
      return summary.pass ? 0 : kExitFail;
    }
  } catch (const uniperf::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const uniperf::OutOfRange& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const uniperf::PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const uniperf::DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return 0;
}
