// Smooth stand-ins for Schwartz functions on the torus.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fl/fft.hpp"

namespace fl {

enum class TestKind { gaussian, modulated_gaussian, bump_sum, random_bandlimited };

struct Bump {
  Vec center{0.0, 0.0};
  double width = 1.0;
  double amplitude = 1.0;
  Vec freq{0.0, 0.0};  // modulation e^{2 pi i freq . x}
};

struct TestParams {
  Vec center{0.0, 0.0};
  double width = 1.0;
  double amplitude = 1.0;
  Vec freq{0.0, 0.0};
  std::vector<Bump> bumps;      // bump_sum
  std::uint64_t seed = 1;       // random_bandlimited
  double cutoff = 0.0;          // spectral radius; 0 means N/(4L)
  bool include_mean = false;    // random_bandlimited: allow a nonzero xi = 0 coefficient
  bool real = true;             // random_bandlimited: Hermitian spectrum
};

namespace detail {
inline void check_width(const GridSpec& spec, double w) {
  if (!(w > 0.0) || w > spec.L / 8.0)
    throw std::invalid_argument("test function width must lie in (0, L/8] to keep periodization negligible");
}

// periodic minimum-image displacement
inline double wrap_dx(double d, double L) { return d - L * std::round(d / L); }

inline cplx bump_value(const GridSpec& spec, const Bump& b, const Vec& x) {
  double r2 = 0.0;
  for (int a = 0; a < spec.n; ++a) {
    double d = wrap_dx(x[a] - b.center[a], spec.L) / b.width;
    r2 += d * d;
  }
  double phase = 2.0 * pi * (b.freq[0] * x[0] + (spec.n == 2 ? b.freq[1] * x[1] : 0.0));
  return b.amplitude * std::exp(-pi * r2) * cplx(std::cos(phase), std::sin(phase));
}
}  // namespace detail

inline GridFunction random_bandlimited(const GridSpec& spec, std::uint64_t seed, double cutoff = 0.0,
                                       bool include_mean = false, bool real = true) {
  const double limit = spec.N / (4.0 * spec.L);
  if (cutoff <= 0.0) cutoff = limit;
  if (cutoff > limit) throw std::invalid_argument("random_bandlimited: cutoff exceeds N/(4L)");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  GridFunction fh(spec, Domain::frequency);
  // Coefficients are drawn in wavenumber order, so refining N at fixed L and cutoff
  // reproduces the same trigonometric polynomial.
  const int K = int(std::ceil(cutoff * spec.L));
  const int N = spec.N;
  auto slot = [N](int k) { return k >= 0 ? k : k + N; };
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = (spec.n == 2 ? -K : 0); k2 <= (spec.n == 2 ? K : 0); ++k2) {
      double re = gauss(rng), im = gauss(rng);
      double r = std::sqrt(double(k1) * k1 + double(k2) * k2) / spec.L;
      if (!(r < cutoff) || (!include_mean && r == 0.0)) continue;
      std::size_t idx = spec.n == 1 ? std::size_t(slot(k1)) : std::size_t(slot(k1)) * N + slot(k2);
      fh[idx] = {re, im};
    }
  }
  GridFunction f = inverse(fh);
  if (real) f = real_part(f);
  // unit L^2 normalization keeps family members comparable
  double nrm = l2_norm(f);
  return nrm > 0.0 ? scaled(f, 1.0 / nrm) : f;
}

inline GridFunction make_test_function(const GridSpec& spec, TestKind kind, const TestParams& p = {}) {
  switch (kind) {
    case TestKind::gaussian:
    case TestKind::modulated_gaussian: {
      detail::check_width(spec, p.width);
      Bump b{p.center, p.width, p.amplitude, kind == TestKind::gaussian ? Vec{0.0, 0.0} : p.freq};
      return sample(spec, [&](const Vec& x) { return detail::bump_value(spec, b, x); });
    }
    case TestKind::bump_sum: {
      for (const auto& b : p.bumps) detail::check_width(spec, b.width);
      return sample(spec, [&](const Vec& x) {
        cplx s = 0.0;
        for (const auto& b : p.bumps) s += detail::bump_value(spec, b, x);
        return s;
      });
    }
    case TestKind::random_bandlimited:
      return random_bandlimited(spec, p.seed, p.cutoff, p.include_mean, p.real);
  }
  throw std::invalid_argument("unknown test function kind");
}

}  // namespace fl
