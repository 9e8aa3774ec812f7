#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "uniperf/error.hpp"
#include "uniperf/point_cloud.hpp"
#include "uniperf/sphere_geometry.hpp"

namespace uniperf {

/// A round annulus missing the cloud with cloud points on both sides.
struct SeparationWitness {
  RoundRing ring;
  double modulus = 0.0;
  bool floored = false;  // inner radius raised to the resolution floor
  std::vector<std::size_t> side_inner;
  std::vector<std::size_t> side_outer;
};

/// Thrown when truncating an annulus at eta/2 leaves nothing.
class AnnulusDiscarded : public Error {
 public:
  using Error::Error;
};

namespace detail {

using Coords = std::array<double, ExtendedPoint::kMaxDim>;

/// Distances from a finite centre to all cloud points in one metric.
class MetricView {
 public:
  MetricView(const PointCloud& c, Metric m) : cloud_(c), metric_(m), n_(c.dim) {
    if (m == Metric::Chordal) {
      lift_.reserve(c.size());
      for (const auto& p : c.points) lift_.push_back(std::sqrt(1.0 + p.norm2()));
    }
  }

  double distance(const Coords& x, std::size_t j) const {
    double d2 = 0.0, x2 = 0.0;
    for (int k = 0; k < n_; ++k) {
      const double t = x[k] - cloud_.points[j][k];
      d2 += t * t;
      x2 += x[k] * x[k];
    }
    if (metric_ == Metric::Euclidean) return std::sqrt(d2);
    // Same operation order as chordal_distance, so witnesses recheck bit-exactly.
    return std::min(std::sqrt(d2) / (std::sqrt(1.0 + x2) * lift_[j]), 1.0);
  }

  void distances(const Coords& x, std::vector<double>& out) const {
    out.resize(cloud_.size());
    for (std::size_t j = 0; j < cloud_.size(); ++j) out[j] = distance(x, j);
  }

  Coords point(std::size_t i) const {
    Coords c{};
    for (int k = 0; k < n_; ++k) c[k] = cloud_.points[i][k];
    return c;
  }

  Metric metric() const { return metric_; }
  int dim() const { return n_; }
  const PointCloud& cloud() const { return cloud_; }

 private:
  const PointCloud& cloud_;
  Metric metric_;
  int n_;
  std::vector<double> lift_;
};

/// Modulus of a round annulus, or -1 where the chordal formula does not apply (w >= 1).
inline double annulus_modulus(Metric m, double u, double w) {
  if (!(u > 0.0) || !(w > u)) return -1.0;
  if (m == Metric::Euclidean) return std::log(w / u);
  if (w >= 1.0) return -1.0;
  return std::log((w / u) * std::sqrt((1.0 - u * u) / (1.0 - w * w)));
}

/// Walks the sorted distances from one centre and calls fn(u, w, floored) for every gap
/// (d_i, d_{i+1}) that can carry a separating annulus at floor eps. Both complementary
/// pieces must be at least eps wide: u >= eps, and in the chordal metric the outer piece,
/// a chordal ball of radius sqrt(1 - w^2) about the antipode, as well. Gaps that cross a
/// floor are clamped to it and reported as floored.
template <class Fn>
void walk_gaps(const std::vector<double>& sorted, double eps, Metric metric, Fn&& fn) {
  const double wmax = metric == Metric::Chordal ? std::sqrt(std::max(0.0, 1.0 - eps * eps))
                                                : std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double a = sorted[i - 1], b = sorted[i];
    if (!(b > a) || b <= eps || a >= wmax) continue;
    const double u = std::max(a, eps), w = std::min(b, wmax);
    if (w > u) fn(u, w, a < eps || b > wmax);
  }
}

inline ExtendedPoint to_point(const Coords& c, int n) {
  return ExtendedPoint(std::span<const double>(c.data(), static_cast<std::size_t>(n)));
}

/// Deterministic uniform in [0, 1) from a 64-bit engine.
inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Strict order used for reports: larger modulus first, then lexicographically smaller
/// centre, then smaller inner radius.
inline bool witness_before(const SeparationWitness& a, const SeparationWitness& b) {
  if (a.modulus != b.modulus) return a.modulus > b.modulus;
  for (int k = 0; k < a.ring.center.dim(); ++k)
    if (a.ring.center[k] != b.ring.center[k]) return a.ring.center[k] < b.ring.center[k];
  return a.ring.inner < b.ring.inner;
}

/// Fills the side lists; returns false when a cloud point lies in the open ring.
inline bool assign_sides(SeparationWitness& w, const PointCloud& cloud) {
  w.side_inner.clear();
  w.side_outer.clear();
  bool ok = true;
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    const double d = distance(w.ring.metric, w.ring.center, cloud.points[j]);
    if (d <= w.ring.inner) w.side_inner.push_back(j);
    else if (d >= w.ring.outer) w.side_outer.push_back(j);
    else ok = false;
  }
  return ok;
}

/// Recomputes the separation condition from scratch.
inline bool witness_separates(const SeparationWitness& w, const PointCloud& cloud) {
  SeparationWitness t = w;
  return assign_sides(t, cloud) && !t.side_inner.empty() && !t.side_outer.empty();
}

namespace detail {

/// Bounded collection of the best witnesses.
class WitnessPool {
 public:
  explicit WitnessPool(std::size_t cap) : cap_(cap) {}

  void offer(SeparationWitness w) {
    if (cap_ > 0 && items_.size() >= cap_ && !witness_before(w, items_.back())) return;
    items_.insert(std::upper_bound(items_.begin(), items_.end(), w, witness_before), std::move(w));
    if (cap_ > 0 && items_.size() > cap_) items_.pop_back();
  }
  std::vector<SeparationWitness>& items() { return items_; }

 private:
  std::size_t cap_;
  std::vector<SeparationWitness> items_;
};

}  // namespace detail

/// Centred annuli A(x, d_i, d_{i+1}) over all cloud points x and consecutive distances
/// with both complementary pieces at least eps wide. Only when no such gap exists anywhere
/// are the floored witnesses returned instead (flagged). `top_k` = 0 keeps every witness;
/// the result is empty when all pairwise distances are below eps.
inline std::vector<SeparationWitness> radial_gap_scan(const PointCloud& cloud, Metric metric, double eps,
                                                      std::size_t top_k = 0) {
  validate_cloud(cloud);
  if (!(eps > 0.0)) throw OutOfRange("epsilon must be positive");
  const detail::MetricView view(cloud, metric);
  detail::WitnessPool regular(top_k), floored(top_k);
  std::vector<double> d;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    view.distances(view.point(i), d);
    std::sort(d.begin(), d.end());
    detail::walk_gaps(d, eps, metric, [&](double u, double w, bool fl) {
      SeparationWitness s;
      s.ring = RoundRing(cloud.points[i], u, w, metric);
      s.modulus = detail::annulus_modulus(metric, u, w);
      s.floored = fl;
      (fl ? floored : regular).offer(std::move(s));
    });
  }
  auto out = regular.items().empty() ? std::move(floored.items()) : std::move(regular.items());
  for (auto& w : out) assign_sides(w, cloud);
  return out;
}

namespace detail {

struct GapResult {
  double modulus = -1.0;
  double inner = 0.0;
  double outer = 0.0;
};

/// Best regular gap seen from an arbitrary centre.
inline GapResult best_gap(const MetricView& view, const Coords& c, double eps, std::vector<double>& buf) {
  view.distances(c, buf);
  std::sort(buf.begin(), buf.end());
  GapResult best;
  walk_gaps(buf, eps, view.metric(), [&](double u, double w, bool floored) {
    if (floored) return;
    const double m = annulus_modulus(view.metric(), u, w);
    if (m > best.modulus) best = {m, u, w};
  });
  return best;
}

/// Candidate centres for a collinear cloud: x_a +- eps on the line and every pairwise
/// midpoint. Between consecutive events the distance order is fixed and each ratio
/// d_b / d_a is monotone in the centre, so the best centre on the line is among them.
/// Empty unless the cloud is collinear and all events fit in `limit` evaluations.
inline std::vector<Coords> line_events(const PointCloud& cloud, double eps, int limit) {
  const std::size_t m = cloud.size();
  const int n = cloud.dim;
  if (m < 2 || limit <= 0 || 2 * m + m * (m - 1) / 2 > static_cast<std::size_t>(limit)) return {};
  const auto& p0 = cloud.points.front();
  std::size_t far = 0;
  double len = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double d = euclidean_distance(p0, cloud.points[j]);
    if (d > len) len = d, far = j;
  }
  if (!(len > 0.0)) return {};
  Coords dir{};
  for (int k = 0; k < n; ++k) dir[k] = (cloud.points[far][k] - p0[k]) / len;
  std::vector<double> t(m);
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0, q = 0.0;
    for (int k = 0; k < n; ++k) s += (cloud.points[j][k] - p0[k]) * dir[k];
    for (int k = 0; k < n; ++k) {
      const double r = cloud.points[j][k] - p0[k] - s * dir[k];
      q += r * r;
    }
    if (std::sqrt(q) > 1e-12 * len) return {};
    t[j] = s;
  }
  auto at = [&](double s) {
    Coords c{};
    for (int k = 0; k < n; ++k) c[k] = p0[k] + s * dir[k];
    return c;
  };
  // Nudged outwards so the binding inner distance clears the floor after rounding.
  const double e = eps * (1.0 + 1e-9);
  std::vector<Coords> out;
  out.reserve(2 * m + m * (m - 1) / 2);
  for (double s : t) {
    out.push_back(at(s - e));
    out.push_back(at(s + e));
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) out.push_back(at(0.5 * (t[i] + t[j])));
  return out;
}

}  // namespace detail

/// Local search over annulus centres that need not be cloud points. Seeds: centres of the
/// best scan witnesses, midpoints between each such centre and its binding inner point,
/// random cloud points and random perturbations; each seed is refined by compass search.
/// Never returns less than the best regular scan witness.
namespace detail {

/// Search seeded by `scan`, the best regular centred witnesses with sides assigned.
inline SeparationWitness search_from(const PointCloud& cloud, Metric metric, double eps, int budget,
                                     std::uint64_t seed, const std::vector<SeparationWitness>& scan) {
  const int n = cloud.dim;
  const detail::MetricView view(cloud, metric);

  SeparationWitness best;
  best.modulus = -1.0;
  if (!scan.empty()) best = scan.front();

  std::vector<double> buf;
  int evals = 0;
  auto consider = [&](const detail::Coords& c, const detail::GapResult& g) {
    if (g.modulus < 0.0) return;
    SeparationWitness w;
    w.ring = RoundRing(detail::to_point(c, n), g.inner, g.outer, metric);
    w.modulus = g.modulus;
    if (best.modulus < 0.0 || witness_before(w, best)) best = std::move(w);
  };
  auto refine = [&](detail::Coords c, double step) {
    auto g = detail::best_gap(view, c, eps, buf);
    ++evals;
    consider(c, g);
    const double stop = step * 1e-6;
    while (step > stop && evals < budget) {
      bool moved = false;
      for (int k = 0; k < n && evals < budget; ++k)
        for (int sgn : {1, -1}) {
          auto t = c;
          t[k] += sgn * step;
          const auto gt = detail::best_gap(view, t, eps, buf);
          ++evals;
          if (gt.modulus > g.modulus) {
            c = t;
            g = gt;
            moved = true;
            consider(c, g);
            break;
          }
          if (evals >= budget) break;
        }
      if (!moved) step *= 0.5;
    }
  };

  std::vector<std::pair<detail::Coords, double>> seeds;
  for (const auto& w : scan) {
    detail::Coords c{};
    for (int k = 0; k < n; ++k) c[k] = w.ring.center[k];
    seeds.push_back({c, 0.25 * w.ring.inner});
    // Midpoint towards the farthest point on the inner side.
    double far = -1.0;
    std::size_t jf = 0;
    for (auto j : w.side_inner) {
      const double d = view.distance(c, j);
      if (d > far) {
        far = d;
        jf = j;
      }
    }
    if (far > 0.0) {
      detail::Coords m{};
      for (int k = 0; k < n; ++k) m[k] = 0.5 * (c[k] + cloud.points[jf][k]);
      seeds.push_back({m, 0.25 * far});
    }
  }
  for (const auto& c : detail::line_events(cloud, eps, budget - evals)) {
    consider(c, detail::best_gap(view, c, eps, buf));
    ++evals;
  }
  for (const auto& [c, step] : seeds) {
    if (evals >= budget) break;
    refine(c, step);
  }
  std::mt19937_64 rng(seed);
  double scale = eps;
  for (int k = 0; k < n; ++k) {
    double lo = cloud.points.front()[k], hi = lo;
    for (const auto& p : cloud.points) {
      lo = std::min(lo, p[k]);
      hi = std::max(hi, p[k]);
    }
    scale = std::max(scale, hi - lo);
  }
  while (evals < budget) {
    const auto i = static_cast<std::size_t>(detail::uniform01(rng) * static_cast<double>(cloud.size()));
    auto c = view.point(std::min(i, cloud.size() - 1));
    if (best.modulus >= 0.0 && detail::uniform01(rng) < 0.5) {
      for (int k = 0; k < n; ++k) c[k] = best.ring.center[k];
    }
    const double r = eps * std::pow(scale / eps, detail::uniform01(rng));
    for (int k = 0; k < n; ++k) c[k] += r * (2.0 * detail::uniform01(rng) - 1.0);
    refine(c, 0.25 * r);
  }
  if (best.modulus < 0.0) {
    best.modulus = 0.0;
    return best;
  }
  assign_sides(best, cloud);
  return best;
}

}  // namespace detail

inline SeparationWitness center_optimized_search(const PointCloud& cloud, Metric metric, double eps,
                                                 int budget = 2000, std::uint64_t seed = 1) {
  validate_cloud(cloud);
  if (!(eps > 0.0)) throw OutOfRange("epsilon must be positive");
  if (budget < 1) throw OutOfRange("search budget must be positive");
  auto scan = radial_gap_scan(cloud, metric, eps, 16);
  scan.erase(std::remove_if(scan.begin(), scan.end(), [](const auto& w) { return w.floored; }), scan.end());
  return detail::search_from(cloud, metric, eps, budget, seed, scan);
}

/// Centred chordal annulus from the two complementary pieces E, F of a ring separating X.
/// Requires chi(E) <= chi(F) and the gate 10 chi(E) <= chi(E, F).
inline RoundRing ring_to_centered_annulus(const std::vector<ExtendedPoint>& E, const std::vector<ExtendedPoint>& F,
                                          const PointCloud& X) {
  if (E.empty() || F.empty()) throw PreconditionError("both complementary pieces need points");
  auto chordal_diam = [](const std::vector<ExtendedPoint>& S) {
    double d = 0.0;
    for (std::size_t i = 0; i < S.size(); ++i)
      for (std::size_t j = i + 1; j < S.size(); ++j) d = std::max(d, chordal_distance(S[i], S[j]));
    return d;
  };
  const double dE = chordal_diam(E), dF = chordal_diam(F);
  if (dE > dF) throw PreconditionError("expected chi(E) <= chi(F)");
  double dEF = std::numeric_limits<double>::infinity();
  for (const auto& e : E)
    for (const auto& f : F) dEF = std::min(dEF, chordal_distance(e, f));
  if (!(10.0 * dE <= dEF)) throw PreconditionError("gate 10 chi(E) <= chi(E, F) fails");
  const ExtendedPoint* x = nullptr;
  for (const auto& e : E) {
    for (const auto& p : X.points)
      if (chordal_distance(e, p) <= 1e-12) {
        x = &e;
        break;
      }
    if (x) break;
  }
  if (!x) throw PreconditionError("E does not meet X");
  double w = std::numeric_limits<double>::infinity();
  for (const auto& f : F) w = std::min(w, chordal_distance(*x, f));
  if (w >= 1.0) throw OutOfRange("chordal annulus would reach the antipode");
  if (dE <= 0.0) {
    // A single point: any inner radius below w works; use the gate's scale.
    return RoundRing(*x, dEF / 10.0, w, Metric::Chordal);
  }
  return RoundRing(*x, dE, w, Metric::Chordal);
}

/// Chordal distance from infinity to the closest point of X.
inline double chordal_eta(const PointCloud& X) {
  double eta = std::numeric_limits<double>::infinity();
  for (const auto& p : X.points) eta = std::min(eta, chordal_distance(p, ExtendedPoint::infinity(p.dim())));
  return eta;
}

/// Truncates the outer radius to min(eta / 2, w) so the ring stays away from infinity.
inline RoundRing bounded_annulus_normalization(const RoundRing& ring, const PointCloud& X, double eta) {
  if (ring.metric != Metric::Chordal) throw PreconditionError("expected a chordal annulus");
  for (const auto& p : X.points)
    if (p.is_infinite()) throw PreconditionError("X must consist of finite points");
  if (!(eta > 0.0)) throw OutOfRange("eta must be positive");
  const double v = std::min(0.5 * eta, ring.outer);
  if (ring.inner >= v)
    throw AnnulusDiscarded("inner radius " + std::to_string(ring.inner) + " reaches eta/2 = " +
                           std::to_string(0.5 * eta));
  RoundRing out = ring;
  out.outer = v;
  return out;
}

struct AnalyzeConfig {
  double epsilon = 0.0;  // 0: twice the sampling scale, else the 1st percentile of NN distances
  std::size_t top_k = 5;
  int search_budget = 2000;
  std::uint64_t seed = 1;
  int refinement_levels = 4;  // floors eps * 2^k for k = levels-1 .. 0
};

struct GapStats {
  std::size_t count = 0;
  double min = 0.0, median = 0.0, p90 = 0.0, p99 = 0.0, max = 0.0, mean = 0.0;
};

struct PerfectnessReport {
  double alpha_hat = 0.0;
  double epsilon = 0.0;
  std::string epsilon_source;
  bool resolution_caveat = false;  // only floored annuli separate: not perfect at this floor
  double alpha_euclidean = 0.0;
  double alpha_chordal = 0.0;
  std::vector<SeparationWitness> witnesses;
  GapStats per_point_gap_stats;
  std::vector<std::pair<double, double>> refinement;  // (floor, scan alpha), floors decreasing
  std::size_t points = 0;
  int dim = 2;
};

inline double default_epsilon(const PointCloud& cloud, std::string* source = nullptr) {
  const double s = cloud.sampling_scale();
  if (std::isfinite(s) && s > 0.0) {
    if (source) *source = "2 x sampling_scale";
    return 2.0 * s;
  }
  auto nn = nearest_neighbor_distances(cloud);
  nn.erase(std::remove_if(nn.begin(), nn.end(), [](double d) { return !(d > 0.0); }), nn.end());
  if (nn.empty()) throw PreconditionError("all pairwise distances are zero");
  if (source) *source = "1st percentile of nearest-neighbour distances";
  return quantile(nn, 0.01);
}

inline PerfectnessReport analyze(const PointCloud& cloud, const AnalyzeConfig& cfg = {}) {
  validate_cloud(cloud);
  PerfectnessReport rep;
  rep.points = cloud.size();
  rep.dim = cloud.dim;
  rep.epsilon = cfg.epsilon > 0.0 ? cfg.epsilon : default_epsilon(cloud, &rep.epsilon_source);
  if (cfg.epsilon > 0.0) rep.epsilon_source = "given";
  const double eps = rep.epsilon;
  const int levels = std::max(1, cfg.refinement_levels);

  detail::WitnessPool regular(cfg.top_k), floored(cfg.top_k);
  std::vector<double> per_point(cloud.size(), 0.0);
  std::vector<double> series(static_cast<std::size_t>(levels), 0.0);
  std::vector<double> d;
  for (Metric metric : {Metric::Euclidean, Metric::Chordal}) {
    const detail::MetricView view(cloud, metric);
    detail::WitnessPool seeds(16);
    double alpha = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      view.distances(view.point(i), d);
      std::sort(d.begin(), d.end());
      for (int k = 0; k < levels; ++k) {
        const double floor_k = eps * std::ldexp(1.0, levels - 1 - k);
        detail::walk_gaps(d, floor_k, metric, [&](double u, double w, bool fl) {
          if (fl) return;
          const double m = detail::annulus_modulus(metric, u, w);
          series[static_cast<std::size_t>(k)] = std::max(series[static_cast<std::size_t>(k)], m);
        });
      }
      detail::walk_gaps(d, eps, metric, [&](double u, double w, bool fl) {
        const double m = detail::annulus_modulus(metric, u, w);
        if (m < 0.0) return;
        if (!fl && metric == Metric::Euclidean) per_point[i] = std::max(per_point[i], m);
        if (!fl) alpha = std::max(alpha, m);
        SeparationWitness s;
        s.ring = RoundRing(cloud.points[i], u, w, metric);
        s.modulus = m;
        s.floored = fl;
        if (!fl) seeds.offer(s);
        (fl ? floored : regular).offer(std::move(s));
      });
    }
    // Without a regular centred gap the cloud is not perfect at this floor; the search
    // would only report further floor artefacts.
    if (alpha == 0.0) continue;
    auto& scan = seeds.items();
    for (auto& w : scan) assign_sides(w, cloud);
    auto searched = detail::search_from(cloud, metric, eps, cfg.search_budget, cfg.seed, scan);
    if (searched.modulus > 0.0) {
      alpha = std::max(alpha, searched.modulus);
      regular.offer(std::move(searched));
    }
    (metric == Metric::Euclidean ? rep.alpha_euclidean : rep.alpha_chordal) = alpha;
  }

  auto& reg = regular.items();
  if (!reg.empty()) {
    rep.witnesses = std::move(reg);
  } else {
    rep.witnesses = std::move(floored.items());
    rep.resolution_caveat = true;
  }
  for (auto& w : rep.witnesses) assign_sides(w, cloud);
  rep.alpha_hat = rep.witnesses.empty() ? 0.0 : rep.witnesses.front().modulus;

  for (int k = 0; k < levels; ++k)
    rep.refinement.push_back({eps * std::ldexp(1.0, levels - 1 - k), series[static_cast<std::size_t>(k)]});

  auto& g = rep.per_point_gap_stats;
  g.count = per_point.size();
  if (!per_point.empty()) {
    g.min = *std::min_element(per_point.begin(), per_point.end());
    g.max = *std::max_element(per_point.begin(), per_point.end());
    g.median = quantile(per_point, 0.5);
    g.p90 = quantile(per_point, 0.9);
    g.p99 = quantile(per_point, 0.99);
    double s = 0.0;
    for (double v : per_point) s += v;
    g.mean = s / static_cast<double>(per_point.size());
  }
  return rep;
}

}  // namespace uniperf
