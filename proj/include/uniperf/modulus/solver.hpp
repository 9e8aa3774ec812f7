#pragma once

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <unordered_set>
#include <utility>
#include <vector>

#include "uniperf/error.hpp"
#include "uniperf/modulus/condenser.hpp"
#include "uniperf/sphere_geometry.hpp"

namespace uniperf::modulus {

struct SolveOptions {
  double p = 0.0;  // 0 means the conformal exponent n
  double tol = 1e-3;
  int max_iterations = 10000;  // cap on restricted-solver sweeps in one round
  int max_rounds = 2000;
  std::size_t max_paths_per_round = 4096;
  int sweeps_per_round = 5;  // while violated paths are still being added
  int polish_sweeps = 50;    // once no new violated path appears
  double gap_tol = 5e-3;     // relative gap between capacity and the dual bound
  int prune_after = 3;       // rounds an idle path survives; 0 keeps every path
  bool trace = false;
};

struct CapacityResult {
  double capacity = 0.0;     // energy of the returned density, scaled to exact admissibility
  double lower_bound = 0.0;  // dual value of the final restricted problem
  double modulus = std::numeric_limits<double>::infinity();
  int n = 2;
  double p = 2.0;
  int iterations = 0;
  int rounds = 0;
  std::size_t paths = 0;
  double certified_slack = 0.0;  // shortest density length minus 1
  bool connected = true;         // false when no lattice path joins the plates
};

/// Per-node density in chart units. Empty when the plates are not connected.
struct DensityField {
  Lattice lattice;
  std::vector<double> rho;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, CapacityResult best, DensityField density)
      : Error(what), best_(std::move(best)), density_(std::move(density)) {}
  const CapacityResult& best() const { return best_; }
  const DensityField& density() const { return density_; }

 private:
  CapacityResult best_;
  DensityField density_;
};

/// Shortest paths from E to F under a node density; length = terminal costs plus
/// sum over edges of length * (rho_u + rho_v) / 2.
class PathSearch {
 public:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  explicit PathSearch(const Discretization& d) : D_(d) {
    for (auto& s : side_) {
      s.dist.resize(d.cls.size());
      s.pred.resize(d.cls.size());
    }
    done_.resize(d.cls.size());
  }

  struct Endpoint {
    double length;
    std::uint32_t node;
  };

  /// Searches from E and returns F-terminal endpoints with total length below `bound`,
  /// sorted by length then node. `tie` adds that multiple of the geometric length so that
  /// flat densities still produce straight paths.
  std::vector<Endpoint> run(const std::vector<double>& rho, double bound, double tie = 1e-9) {
    search(0, rho, bound, tie);
    std::vector<Endpoint> ends;
    const auto& S = side_[0];
    for (std::size_t v = 0; v < S.dist.size(); ++v) {
      if (D_.term_f[v] < 0.0 || !(S.dist[v] < bound)) continue;
      const double tot = S.dist[v] + D_.term_f[v] * (rho[v] + tie);
      if (tot < bound) ends.push_back({tot, static_cast<std::uint32_t>(v)});
    }
    sort_endpoints(ends);
    return ends;
  }

  /// Searches from both plates and returns every free node whose best path through it is
  /// shorter than `bound`, sorted by that length then node.
  std::vector<Endpoint> run_through(const std::vector<double>& rho, double bound,
                                    double tie = 1e-9) {
    search(0, rho, bound, tie);
    search(1, rho, bound, tie);
    std::vector<Endpoint> out;
    for (std::size_t v = 0; v < side_[0].dist.size(); ++v) {
      const double tot = side_[0].dist[v] + side_[1].dist[v];
      if (tot < bound) out.push_back({tot, static_cast<std::uint32_t>(v)});
    }
    sort_endpoints(out);
    return out;
  }

  /// Node sequence from E to the F-terminal `end` after run().
  std::vector<std::uint32_t> path_to(std::uint32_t end) const {
    std::vector<std::uint32_t> p;
    for (std::uint32_t v = end; v != kNone; v = side_[0].pred[v]) p.push_back(v);
    std::reverse(p.begin(), p.end());
    return p;
  }

  /// Node sequence from E through `mid` to F after run_through().
  std::vector<std::uint32_t> path_through(std::uint32_t mid) const {
    std::vector<std::uint32_t> p = path_to(mid);
    for (std::uint32_t v = side_[1].pred[mid]; v != kNone; v = side_[1].pred[v]) p.push_back(v);
    return p;
  }

 private:
  struct Side {
    std::vector<double> dist;
    std::vector<std::uint32_t> pred;
  };

  static void sort_endpoints(std::vector<Endpoint>& e) {
    std::sort(e.begin(), e.end(), [](const Endpoint& a, const Endpoint& b) {
      return a.length < b.length || (a.length == b.length && a.node < b.node);
    });
  }

  /// Dijkstra from plate E (which = 0) or F (which = 1), expanding labels below `bound`.
  void search(int which, const std::vector<double>& rho, double bound, double tie) {
    const Lattice& L = D_.lattice;
    const std::size_t N = D_.cls.size();
    auto& S = side_[which];
    const auto& term = which == 0 ? D_.term_e : D_.term_f;
    std::fill(S.dist.begin(), S.dist.end(), std::numeric_limits<double>::infinity());
    std::fill(S.pred.begin(), S.pred.end(), kNone);
    std::fill(done_.begin(), done_.end(), 0);
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (std::size_t v = 0; v < N; ++v) {
      if (term[v] < 0.0) continue;
      const double d = term[v] * (rho[v] + tie);
      if (d < bound) {
        S.dist[v] = d;
        pq.push({d, static_cast<std::uint32_t>(v)});
      }
    }
    const double h = L.h;
    while (!pq.empty()) {
      const auto [dv, v] = pq.top();
      pq.pop();
      if (done_[v]) continue;
      done_[v] = 1;
      const std::int32_t row = D_.near[v];
      const double rv = rho[v];
      auto relax = [&](std::uint32_t u, std::size_t k) {
        if (done_[u] || D_.cls[u] != NodeClass::Free) return;
        const double nd = dv + D_.stencil[k].length * h * (0.5 * (rv + rho[u]) + tie);
        if (nd < S.dist[u] && nd < bound) {
          S.dist[u] = nd;
          S.pred[u] = v;
          pq.push({nd, u});
        }
      };
      if (row < 0) {
        for (std::size_t k = 0; k < D_.stencil.size(); ++k)
          relax(static_cast<std::uint32_t>(static_cast<std::ptrdiff_t>(v) + D_.linear_offset[k]), k);
      } else {
        const auto ijk = L.unpack(v);
        for (std::size_t k = 0; k < D_.stencil.size(); ++k) {
          if (D_.is_blocked(row, k)) continue;
          std::size_t u;
          if (L.shift(ijk, D_.stencil[k].offset, u)) relax(static_cast<std::uint32_t>(u), k);
        }
      }
    }
  }

  const Discretization& D_;
  Side side_[2];
  std::vector<std::uint8_t> done_;
};

namespace detail {

/// Active constraint set with the dual coordinate-ascent solver for
///   min sum_v w_v rho_v^p  subject to  a_g . rho >= 1 for active paths g.
/// rho_v = (s_v / (p w_v))^(1/(p-1)) with s = sum_g lambda_g a_g.
class ActiveSet {
 public:
  ActiveSet(const Discretization& d, double p) : D_(d), p_(p), q_(1.0 / (p - 1.0)) {
    s_.assign(d.cls.size(), 0.0);
    rho_.assign(d.cls.size(), 0.0);
  }

  const std::vector<double>& rho() const { return rho_; }
  std::size_t size() const { return lambda_.size(); }

  bool add(const std::vector<std::uint32_t>& nodes) {
    std::uint64_t hsh = 1469598103934665603ull;
    for (auto v : nodes) hsh = (hsh ^ v) * 1099511628211ull;
    hsh ^= nodes.size();
    if (!seen_.insert(hsh).second) return false;
    hash_.push_back(hsh);
    age_.push_back(0);
    const std::size_t begin = node_.size();
    const Lattice& L = D_.lattice;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      double a = 0.0;
      if (i == 0) a += D_.term_e[nodes[i]];
      if (i + 1 == nodes.size()) a += D_.term_f[nodes[i]];
      if (i > 0) a += 0.5 * edge_length(nodes[i - 1], nodes[i], L);
      if (i + 1 < nodes.size()) a += 0.5 * edge_length(nodes[i], nodes[i + 1], L);
      node_.push_back(nodes[i]);
      coef_.push_back(a);
    }
    start_.push_back(begin);
    lambda_.push_back(0.0);
    return true;
  }

  double length(std::size_t g) const {
    double L = 0.0;
    for (std::size_t i = start_[g]; i < end(g); ++i) L += coef_[i] * rho_[node_[i]];
    return L;
  }

  /// One forward or backward sweep; returns the largest KKT residual seen before updates.
  /// Paths with zero multiplier that were satisfied last time are only revisited on full sweeps.
  double sweep(bool forward, bool full) {
    double resid = 0.0;
    const std::size_t m = lambda_.size();
    idle_.resize(m, 0);
    for (std::size_t t = 0; t < m; ++t) {
      const std::size_t g = forward ? t : m - 1 - t;
      if (!full && idle_[g] && lambda_[g] == 0.0) continue;
      const double Lg = length(g);
      const double r = lambda_[g] > 0.0 ? std::abs(1.0 - Lg) : std::max(0.0, 1.0 - Lg);
      resid = std::max(resid, r);
      idle_[g] = lambda_[g] == 0.0 && Lg >= 1.0;
      if (r == 0.0) continue;
      update(g, Lg);
    }
    return resid;
  }

  /// Drops paths that carried no multiplier and stayed satisfied for `rounds` calls in a row.
  std::size_t prune(int rounds) {
    const std::size_t m = lambda_.size();
    std::vector<std::uint8_t> keep(m, 1);
    std::size_t dropped = 0;
    for (std::size_t g = 0; g < m; ++g) {
      if (lambda_[g] > 0.0 || length(g) < 1.0) {
        age_[g] = 0;
        continue;
      }
      if (++age_[g] >= rounds) {
        keep[g] = 0;
        ++dropped;
      }
    }
    if (dropped == 0) return 0;
    std::vector<std::uint32_t> node;
    std::vector<double> coef, lambda;
    std::vector<std::size_t> start;
    std::vector<std::uint64_t> hash;
    std::vector<int> age;
    std::vector<std::uint8_t> idle;
    for (std::size_t g = 0; g < m; ++g) {
      if (!keep[g]) {
        seen_.erase(hash_[g]);
        continue;
      }
      start.push_back(node.size());
      for (std::size_t i = start_[g]; i < end(g); ++i) {
        node.push_back(node_[i]);
        coef.push_back(coef_[i]);
      }
      lambda.push_back(lambda_[g]);
      hash.push_back(hash_[g]);
      age.push_back(age_[g]);
      idle.push_back(g < idle_.size() ? idle_[g] : 0);
    }
    node_.swap(node);
    coef_.swap(coef);
    start_.swap(start);
    lambda_.swap(lambda);
    hash_.swap(hash);
    age_.swap(age);
    idle_.swap(idle);
    return dropped;
  }

  double min_length() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < lambda_.size(); ++g) m = std::min(m, length(g));
    return m;
  }

  std::size_t support() const {
    return static_cast<std::size_t>(std::count_if(lambda_.begin(), lambda_.end(), [](double l) { return l > 0.0; }));
  }

  double energy() const {
    double e = 0.0;
    for (std::size_t v = 0; v < rho_.size(); ++v)
      if (rho_[v] > 0.0) e += D_.weight[v] * std::pow(rho_[v], p_);
    return e;
  }

  /// Lagrangian dual at the current multipliers: a lower bound on the discrete modulus
  /// of the whole family.
  double dual() const {
    double sl = 0.0;
    for (double l : lambda_) sl += l;
    return sl - (p_ - 1.0) * energy();
  }

 private:
  std::size_t end(std::size_t g) const { return g + 1 < start_.size() ? start_[g + 1] : node_.size(); }

  static double edge_length(std::uint32_t a, std::uint32_t b, const Lattice& L) {
    const auto x = L.unpack(a), y = L.unpack(b);
    double s = 0.0;
    for (int k = 0; k < L.dim; ++k) {
      int d = y[k] - x[k];
      if (L.periodic[k]) {
        if (d > L.size[k] / 2) d -= L.size[k];
        if (d < -L.size[k] / 2) d += L.size[k];
      }
      s += double(d) * d;
    }
    return std::sqrt(s) * L.h;
  }

  double rho_of(double s, double w) const {
    if (s <= 0.0 || !(w > 0.0)) return 0.0;
    const double x = s / (p_ * w);
    if (q_ == 1.0) return x;
    if (q_ == 0.5) return std::sqrt(x);
    return std::pow(x, q_);
  }

  /// Length of path g and its derivative if lambda_g moved by delta.
  std::pair<double, double> trial(std::size_t g, double delta) const {
    double L = 0.0, dL = 0.0;
    for (std::size_t i = start_[g]; i < end(g); ++i) {
      const auto v = node_[i];
      const double a = coef_[i];
      const double sv = s_[v] + delta * a;
      if (sv <= 0.0) {
        if (q_ < 1.0) dL = std::numeric_limits<double>::infinity();
        continue;
      }
      const double r = rho_of(sv, D_.weight[v]);
      L += a * r;
      dL += a * a * q_ * r / sv;
    }
    return {L, dL};
  }

  void apply(std::size_t g, double delta) {
    lambda_[g] += delta;
    for (std::size_t i = start_[g]; i < end(g); ++i) {
      const auto v = node_[i];
      s_[v] = std::max(0.0, s_[v] + delta * coef_[i]);
      rho_[v] = rho_of(s_[v], D_.weight[v]);
    }
  }

  void update(std::size_t g, double Lg) {
    if (q_ == 1.0) {
      double curv = 0.0;
      for (std::size_t i = start_[g]; i < end(g); ++i) curv += coef_[i] * coef_[i] / (p_ * D_.weight[node_[i]]);
      if (curv <= 0.0) return;
      apply(g, std::max((1.0 - Lg) / curv, -lambda_[g]));
      return;
    }
    // Safeguarded Newton for trial(delta) = 1 on the bracket [lo, hi]; the length is
    // increasing and concave in delta.
    double lo = -lambda_[g], hi;
    if (Lg < 1.0) {
      lo = 0.0;
      hi = std::max(1e-12, lambda_[g]);
      while (trial(g, hi).first < 1.0) hi *= 2.0;
    } else {
      if (trial(g, lo).first >= 1.0) {
        apply(g, lo);
        return;
      }
      hi = 0.0;
    }
    double x = Lg < 1.0 ? lo : hi;
    for (int it = 0; it < 50; ++it) {
      const auto [f, df] = trial(g, x);
      if (std::abs(f - 1.0) < 1e-10) break;
      if (f < 1.0) lo = x;
      else hi = x;
      double nx = std::isfinite(df) && df > 0.0 ? x + (1.0 - f) / df : 0.5 * (lo + hi);
      if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
      x = nx;
      if (hi - lo <= 1e-14 * std::max(1.0, std::abs(hi))) break;
    }
    apply(g, x);
  }

  const Discretization& D_;
  double p_, q_;
  std::vector<double> s_, rho_;
  std::vector<std::uint32_t> node_;
  std::vector<double> coef_;
  std::vector<std::size_t> start_;
  std::vector<double> lambda_;
  std::vector<std::uint8_t> idle_;
  std::vector<std::uint64_t> hash_;
  std::vector<int> age_;
  std::unordered_set<std::uint64_t> seen_;
};

}  // namespace detail

/// Discrete p-modulus of the E-to-F path family by constraint generation.
inline std::pair<CapacityResult, DensityField> solve_modulus(const Discretization& D,
                                                             const SolveOptions& opt = {}) {
  const Lattice& L = D.lattice;
  const double p = opt.p > 0.0 ? opt.p : double(L.n);
  if (!(p > 1.0)) throw OutOfRange("modulus exponent must exceed 1");
  if (!(opt.tol > 0.0 && opt.tol < 0.1)) throw OutOfRange("tol must lie in (0, 0.1)");

  CapacityResult res;
  res.n = L.n;
  res.p = p;

  PathSearch search(D);
  detail::ActiveSet active(D, p);
  const double target = 1.0 - opt.tol;
  const double inner_tol = 0.25 * opt.tol;
  const double inf = std::numeric_limits<double>::infinity();

  auto energy = [&](const std::vector<double>& rho) {
    double e = 0.0;
    for (std::size_t v = 0; v < rho.size(); ++v)
      if (rho[v] > 0.0) e += D.weight[v] * std::pow(rho[v], p);
    return e;
  };
  auto shortest_of = [&](const std::vector<double>& rho) {
    auto all = search.run(rho, inf, 0.0);
    return all.empty() ? inf : all.front().length;
  };

  // Best admissible density so far: any rho divided by its shortest length qualifies.
  std::vector<double> best;
  double upper = inf, lower = 0.0;
  auto consider = [&](const std::vector<double>& rho, double shortest) {
    if (!(shortest > 0.0) || !std::isfinite(shortest)) return false;
    const double u = energy(rho) / std::pow(shortest, p);
    if (!(u < upper)) return false;
    upper = u;
    best = rho;
    for (double& r : best) r /= shortest;
    return true;
  };
  auto finish = [&]() {
    res.capacity = upper;
    res.lower_bound = std::min(upper, std::max(0.0, lower));
    res.modulus = capacity_to_modulus(res.capacity, L.n);
    res.paths = active.size();
    res.certified_slack = shortest_of(best) - 1.0;
    return DensityField{L, best};
  };

  double resid = 1.0;
  for (int round = 0; round < opt.max_rounds; ++round) {
    res.rounds = round + 1;
    auto ends = search.run_through(active.rho(), target);
    if (active.size() == 0 && ends.empty() && best.empty()) {
      // With zero density every path is short, so no candidate means no path at all.
      res.connected = false;
      res.capacity = 0.0;
      res.modulus = inf;
      return {res, DensityField{L, {}}};
    }
    if (active.size() > 0) {
      const double shortest = ends.empty() ? shortest_of(active.rho()) : ends.front().length;
      consider(active.rho(), shortest);
      lower = std::max(lower, active.dual());
      const double gap = (upper - lower) / upper;
      if (opt.trace)
        std::fprintf(stderr, "round %d violated=%zu paths=%zu resid=%.2e shortest=%.5f upper=%.6f lower=%.6f gap=%.2e\n",
                     round, ends.size(), active.size(), resid, shortest, upper, lower, gap);
      if (gap <= opt.gap_tol || (ends.empty() && resid < inner_tol)) {
        auto field = finish();
        return {res, field};
      }
    }

    std::size_t added = 0;
    const std::size_t cap = opt.max_paths_per_round;
    if (ends.size() <= cap) {
      for (const auto& e : ends) added += active.add(search.path_through(e.node));
    } else {
      added += active.add(search.path_through(ends.front().node));
      std::vector<PathSearch::Endpoint> by_node(ends.begin(), ends.end());
      std::sort(by_node.begin(), by_node.end(),
                [](const auto& a, const auto& b) { return a.node < b.node; });
      const double stride = double(by_node.size()) / double(cap);
      for (std::size_t i = 0; i < cap; ++i)
        added += active.add(search.path_through(by_node[static_cast<std::size_t>(i * stride)].node));
    }

    // Warm-started inexact solve while new paths keep arriving; polish once they stop.
    const int budget = added > 0 ? opt.sweeps_per_round : opt.polish_sweeps;
    int it = 0;
    while (it < budget && it < opt.max_iterations) {
      const bool full = it % 4 == 3 || it + 1 == budget;
      resid = active.sweep(it % 2 == 0, full);
      ++it;
      if (full && resid < inner_tol) break;
    }
    res.iterations += it;
    if (opt.prune_after > 0) active.prune(opt.prune_after);
  }
  if (best.empty()) consider(active.rho(), shortest_of(active.rho()));
  auto field = finish();
  throw ConvergenceError("constraint generation hit the round limit", res, field);
}

inline std::pair<CapacityResult, DensityField> solve_modulus(const GridCondenser& c,
                                                             const SolveOptions& opt = {}) {
  return solve_modulus(discretize(c), opt);
}

}  // namespace uniperf::modulus
