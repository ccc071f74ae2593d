// Flat binary container and CSV dump for grid functions.
// Layout (native little-endian): int32 n, int32 N, float64 L, int32 domain (0 space, 1 frequency),
// then N^n pairs of float64 (re, im) in row-major storage order.
#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "fl/grid.hpp"

namespace fl {

namespace detail {
template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw std::runtime_error("grid container truncated");
  return v;
}
}  // namespace detail

inline void write_binary(std::ostream& os, const GridFunction& f) {
  detail::put<std::int32_t>(os, f.spec.n);
  detail::put<std::int32_t>(os, f.spec.N);
  detail::put<double>(os, f.spec.L);
  detail::put<std::int32_t>(os, f.domain == Domain::space ? 0 : 1);
  for (const auto& v : f.values) {
    detail::put<double>(os, v.real());
    detail::put<double>(os, v.imag());
  }
}

inline GridFunction read_binary(std::istream& is) {
  int n = detail::get<std::int32_t>(is);
  int N = detail::get<std::int32_t>(is);
  double L = detail::get<double>(is);
  int tag = detail::get<std::int32_t>(is);
  if (tag != 0 && tag != 1) throw std::runtime_error("grid container: bad domain tag");
  GridSpec spec(n, N, L);
  GridFunction f(spec, tag == 0 ? Domain::space : Domain::frequency);
  for (auto& v : f.values) {
    double re = detail::get<double>(is);
    double im = detail::get<double>(is);
    v = {re, im};
  }
  return f;
}

inline void save_binary(const std::string& path, const GridFunction& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_binary(os, f);
}

inline GridFunction load_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_binary(is);
}

// One row per sample: index columns, coordinate (or frequency) columns, re, im.
inline void write_csv(std::ostream& os, const GridFunction& f) {
  const bool freq = f.domain == Domain::frequency;
  const char* c = freq ? "xi" : "x";
  if (f.spec.n == 1)
    os << "i," << c << ",re,im\n";
  else
    os << "i,j," << c << "1," << c << "2,re,im\n";
  os << std::setprecision(17);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    Vec p = freq ? f.spec.frequency(idx) : f.spec.point(idx);
    if (f.spec.n == 1)
      os << idx << ',' << p[0];
    else
      os << idx / f.spec.N << ',' << idx % f.spec.N << ',' << p[0] << ',' << p[1];
    os << ',' << f[idx].real() << ',' << f[idx].imag() << '\n';
  }
}

}  // namespace fl
