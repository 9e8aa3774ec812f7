#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <type_traits>
#include <istream>
#include <ostream>

#include "uniperf/error.hpp"
#include "uniperf/modulus/solver.hpp"

namespace uniperf::modulus {

// Flat little-endian density grid:
//   0  "UPDF"
//   4  u16 version, u8 grid dimension, u8 chart
//   8  u16 nx, ny, nz, u16 space dimension n
//  16  f32 origin x, y, z, f32 spacing h
//  32  f64 rho, x fastest

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  U u;
  if constexpr (std::is_floating_point_v<T>) u = std::bit_cast<U>(v);
  else u = static_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) os.put(static_cast<char>((u >> (8 * i)) & 0xff));
}

template <class T>
T get_le(std::istream& is) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw InputError("truncated density file");
    u |= static_cast<U>(static_cast<unsigned char>(c)) << (8 * i);
  }
  if constexpr (std::is_floating_point_v<T>) return std::bit_cast<T>(u);
  else return static_cast<T>(u);
}

}  // namespace detail

inline void write_density(std::ostream& os, const DensityField& f) {
  const Lattice& L = f.lattice;
  if (!f.rho.empty() && f.rho.size() != L.node_count())
    throw PreconditionError("density size does not match its lattice");
  for (int a = 0; a < 3; ++a)
    if (L.size[a] > 0xffff) throw OutOfRange("lattice too large for the density header");
  os.write("UPDF", 4);
  detail::put_le<std::uint16_t>(os, 1);
  os.put(static_cast<char>(L.dim));
  os.put(static_cast<char>(L.chart));
  for (int a = 0; a < 3; ++a) detail::put_le<std::uint16_t>(os, static_cast<std::uint16_t>(L.size[a]));
  detail::put_le<std::uint16_t>(os, static_cast<std::uint16_t>(L.n));
  for (int a = 0; a < 3; ++a) detail::put_le<float>(os, static_cast<float>(L.origin[a]));
  detail::put_le<float>(os, static_cast<float>(L.h));
  for (std::size_t v = 0; v < L.node_count(); ++v) detail::put_le<double>(os, f.rho.empty() ? 0.0 : f.rho[v]);
}

/// Reads a density grid; origin and spacing come back at single precision.
inline DensityField read_density(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "UPDF", 4) != 0) throw InputError("not a density file");
  if (detail::get_le<std::uint16_t>(is) != 1) throw InputError("unsupported density file version");
  DensityField f;
  Lattice& L = f.lattice;
  L.dim = is.get();
  const int chart = is.get();
  if (chart < 0 || chart > 2) throw InputError("unknown chart in density file");
  L.chart = static_cast<Chart>(chart);
  for (int a = 0; a < 3; ++a) L.size[a] = detail::get_le<std::uint16_t>(is);
  L.n = detail::get_le<std::uint16_t>(is);
  for (int a = 0; a < 3; ++a) L.origin[a] = detail::get_le<float>(is);
  L.h = detail::get_le<float>(is);
  try {
    L.validate();
  } catch (const Error& e) {
    throw InputError(std::string("bad density header: ") + e.what());
  }
  f.rho.resize(L.node_count());
  for (auto& r : f.rho) r = detail::get_le<double>(is);
  return f;
}

}  // namespace uniperf::modulus
