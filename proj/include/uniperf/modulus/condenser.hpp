#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "uniperf/error.hpp"
#include "uniperf/modulus/lattice.hpp"
#include "uniperf/modulus/plates.hpp"

namespace uniperf::modulus {

/// Lattice plus two plates and optional walls that paths may not cross.
struct GridCondenser {
  Lattice lattice;
  Plate plate_e;
  Plate plate_f;
  Plate walls;
  int stencil_radius = 0;  // 0 picks 3 in 2-d and 2 in 3-d

  int effective_stencil_radius() const {
    return stencil_radius > 0 ? stencil_radius : (lattice.dim == 2 ? 3 : 2);
  }
};

class PlatesTouch : public Error {
 public:
  using Error::Error;
};

enum class NodeClass : std::uint8_t { Free = 0, PlateE = 1, PlateF = 2, Wall = 3 };

/// Rasterised condenser: node classes, volume weights, terminal costs and blocked edges.
struct Discretization {
  Lattice lattice;
  std::vector<StencilDir> stencil;
  std::vector<std::ptrdiff_t> linear_offset;  // valid for interior nodes
  std::vector<NodeClass> cls;
  std::vector<double> weight;      // volume carried by each free node
  std::vector<double> term_e;      // distance to E for E-terminal nodes, negative otherwise
  std::vector<double> term_f;      // same for F
  std::vector<std::int32_t> near;  // row into `blocked`, or -1 for interior nodes
  std::vector<std::uint64_t> blocked;
  int words = 1;
  std::size_t free_count = 0;

  bool is_blocked(std::int32_t row, std::size_t dir) const {
    return (blocked[static_cast<std::size_t>(row) * static_cast<std::size_t>(words) + dir / 64] >>
            (dir % 64)) & 1u;
  }
};

namespace detail {

enum Role { kE = 0, kF = 1, kW = 2 };

struct PlateField {
  const Lattice* L;
  const Plate* plate[3];
  double thin_inflation;

  template <class Fn>
  double wrapped(const Vec3& x, Fn&& fn) const {
    double best = fn(x);
    for (int a = 0; a < L->dim; ++a) {
      if (!L->periodic[a]) continue;
      Vec3 y = x;
      const double per = L->period(a);
      y[a] = x[a] + per;
      best = std::min(best, fn(y));
      y[a] = x[a] - per;
      best = std::min(best, fn(y));
    }
    return best;
  }

  /// Rasterisation level set: <= 0 on the (slightly inflated) plate.
  double phi(int role, const Vec3& x) const {
    const Plate& p = *plate[role];
    if (p.empty()) return std::numeric_limits<double>::infinity();
    return wrapped(x, [&](const Vec3& y) {
      double b = std::numeric_limits<double>::infinity();
      for (const auto& s : p.shapes) b = std::min(b, s->sd(y) - (s->solid() ? 0.0 : thin_inflation));
      return b;
    });
  }

  /// Level set of the solid part only; thin shapes carry no volume.
  double phi_solid(int role, const Vec3& x) const {
    const Plate& p = *plate[role];
    if (p.empty()) return std::numeric_limits<double>::infinity();
    return wrapped(x, [&](const Vec3& y) {
      double b = std::numeric_limits<double>::infinity();
      for (const auto& s : p.shapes)
        if (s->solid()) b = std::min(b, s->sd(y));
      return b;
    });
  }

  /// Distance from x to the true plate.
  double distance(int role, const Vec3& x) const {
    const Plate& p = *plate[role];
    return wrapped(x, [&](const Vec3& y) {
      double b = std::numeric_limits<double>::infinity();
      for (const auto& s : p.shapes) b = std::min(b, std::max(0.0, s->sd(y)));
      return b;
    });
  }
};

}  // namespace detail

/// Builds the discretisation. Throws PlatesTouch when a stencil edge joins E to F directly
/// or when the plates overlap.
inline Discretization discretize(const GridCondenser& c) {
  using detail::kE;
  using detail::kF;
  using detail::kW;
  const Lattice& L = c.lattice;
  L.validate();
  if (c.plate_e.empty() || c.plate_f.empty()) throw PreconditionError("both plates must be non-empty");

  Discretization D;
  D.lattice = L;
  const int R = c.effective_stencil_radius();
  D.stencil = make_stencil(L.dim, R);
  D.words = static_cast<int>((D.stencil.size() + 63) / 64);
  for (const auto& s : D.stencil)
    D.linear_offset.push_back(
        (static_cast<std::ptrdiff_t>(s.offset[2]) * L.size[1] + s.offset[1]) * L.size[0] +
        s.offset[0]);

  const std::size_t N = L.node_count();
  const detail::PlateField field{&L, {&c.plate_e, &c.plate_f, &c.walls}, 0.5 * L.h};
  D.cls.assign(N, NodeClass::Free);
  D.weight.assign(N, 0.0);
  D.term_e.assign(N, -1.0);
  D.term_f.assign(N, -1.0);
  D.near.assign(N, -1);

  double max_len = 0.0;
  for (const auto& s : D.stencil) max_len = std::max(max_len, s.length);
  const double reach = (max_len + 1.0) * L.h;
  const double half_diag = 0.5 * L.h * std::sqrt(double(L.dim));

  std::vector<double> phi_min(N);
  for (std::size_t v = 0; v < N; ++v) {
    const Vec3 x = L.coords(v);
    const double pe = field.phi(kE, x), pf = field.phi(kF, x), pw = field.phi(kW, x);
    if (pe <= 0.0 && pf <= 0.0) throw PlatesTouch("plates overlap");
    if (pe <= 0.0) {
      D.cls[v] = NodeClass::PlateE;
    } else if (pf <= 0.0) {
      D.cls[v] = NodeClass::PlateF;
    } else if (pw <= 0.0) {
      D.cls[v] = NodeClass::Wall;
    }
    phi_min[v] = std::min({pe, pf, pw});
  }

  auto near_side = [&](const std::array<int, 3>& ijk) {
    for (int a = 0; a < L.dim; ++a)
      if (ijk[a] < R || ijk[a] >= L.size[a] - R) return true;
    return false;
  };

  // Blocked-direction masks for nodes close to plates, walls or the lattice boundary.
  std::int32_t rows = 0;
  for (std::size_t v = 0; v < N; ++v) {
    if (std::abs(phi_min[v]) < reach || near_side(L.unpack(v))) D.near[v] = rows++;
  }
  D.blocked.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(D.words), 0);

  for (std::size_t v = 0; v < N; ++v) {
    const std::int32_t row = D.near[v];
    if (row < 0) continue;
    const auto ijk = L.unpack(v);
    const Vec3 x = L.coords(ijk);
    const NodeClass cv = D.cls[v];
    bool hit_e = false, hit_f = false;
    for (std::size_t d = 0; d < D.stencil.size(); ++d) {
      const auto& s = D.stencil[d];
      std::size_t u;
      bool blocked = false;
      if (!L.shift(ijk, s.offset, u)) {
        blocked = true;
      } else if (cv != NodeClass::Free) {
        if ((cv == NodeClass::PlateE && D.cls[u] == NodeClass::PlateF) ||
            (cv == NodeClass::PlateF && D.cls[u] == NodeClass::PlateE))
          throw PlatesTouch("plates touch: a lattice edge joins E to F");
        blocked = true;
      } else if (D.cls[u] != NodeClass::Free) {
        blocked = true;
        hit_e |= D.cls[u] == NodeClass::PlateE;
        hit_f |= D.cls[u] == NodeClass::PlateF;
      } else if (phi_min[v] < reach) {
        // March along the edge, stepping by the distance bound.
        const double len = s.length * L.h;
        double t = 0.0;
        while (t < len) {
          Vec3 y = x;
          for (int a = 0; a < L.dim; ++a) y[a] += s.offset[a] * L.h * (t / len);
          double step = std::numeric_limits<double>::infinity();
          int hit = -1;
          for (int role = 0; role < 3; ++role) {
            const double ph = field.phi(role, y);
            if (ph <= 0.0) {
              hit = role;
              break;
            }
            step = std::min(step, ph);
          }
          if (hit >= 0) {
            blocked = true;
            hit_e |= hit == kE;
            hit_f |= hit == kF;
            break;
          }
          t += std::max(step, L.h / 8.0);
        }
      }
      if (blocked)
        D.blocked[static_cast<std::size_t>(row) * static_cast<std::size_t>(D.words) + d / 64] |=
            std::uint64_t{1} << (d % 64);
    }
    if (cv == NodeClass::Free) {
      if (hit_e) D.term_e[v] = field.distance(kE, x);
      if (hit_f) D.term_f[v] = field.distance(kF, x);
    }
  }

  // Volume weights: clipped chart volume times the fraction of the cell outside solid plates.
  const int sub = 4;
  auto outside_fraction = [&](const std::array<int, 3>& ijk) {
    const auto cell = L.cell(ijk);
    double in = 0.0, all = 0.0;
    const int kmax = L.dim == 3 ? sub : 1;
    for (int a = 0; a < sub; ++a)
      for (int b = 0; b < sub; ++b)
        for (int k = 0; k < kmax; ++k) {
          Vec3 y{};
          const int id[3] = {a, b, k};
          for (int ax = 0; ax < L.dim; ++ax)
            y[ax] = cell[ax][0] + (id[ax] + 0.5) / sub * (cell[ax][1] - cell[ax][0]);
          const double dens = L.density(y);
          all += dens;
          if (field.phi_solid(kE, y) > 0.0 && field.phi_solid(kF, y) > 0.0 && field.phi_solid(kW, y) > 0.0)
            in += dens;
        }
    return all > 0.0 ? in / all : 0.0;
  };

  std::vector<double> spill(N, 0.0);
  for (std::size_t v = 0; v < N; ++v) {
    const auto ijk = L.unpack(v);
    double frac = 1.0;
    if (phi_min[v] < half_diag) frac = outside_fraction(ijk);
    const double w = L.cell_weight(ijk) * frac;
    if (D.cls[v] == NodeClass::Free) {
      D.weight[v] += std::max(w, 1e-3 * L.cell_weight(ijk));
      ++D.free_count;
      continue;
    }
    if (w <= 0.0) continue;
    // Hand the free part of a plate cell to its free axis neighbours.
    std::vector<std::size_t> nb;
    for (int a = 0; a < L.dim; ++a)
      for (int sgn : {-1, 1}) {
        std::array<int, 3> off{};
        off[a] = sgn;
        std::size_t u;
        if (L.shift(ijk, off, u) && D.cls[u] == NodeClass::Free) nb.push_back(u);
      }
    for (std::size_t u : nb) spill[u] += w / static_cast<double>(nb.size());
  }
  for (std::size_t v = 0; v < N; ++v) D.weight[v] += spill[v];
  return D;
}

}  // namespace uniperf::modulus
