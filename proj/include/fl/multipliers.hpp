// Applying linear and bilinear multipliers on the grid, translated kernels,
// and numerical symbol seminorms.
#pragma once

#include <cstdint>
#include <exception>
#include <limits>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fl/fft.hpp"
#include "fl/symbols.hpp"

namespace fl {

// ---------------------------------------------------------------- linear

inline GridFunction apply_linear_hat(GridFunction fh, const LinearSymbol& m) {
  fh.require(Domain::frequency, "apply_linear_hat");
  if (m.identity) return fh;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    if (fh.spec.nyquist_index(i)) {
      fh[i] = 0.0;
      continue;
    }
    cplx v = m(fh.spec.frequency(i));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::domain_error("linear symbol is singular at a grid frequency");
    fh[i] *= v;
  }
  return fh;
}

inline GridFunction apply_linear(const GridFunction& f, const LinearSymbol& m) {
  f.require(Domain::space, "apply_linear");
  if (m.identity) return f;
  return inverse(apply_linear_hat(fourier(f), m));
}

// Composition a(D) b(D) ... applied right to left.
inline GridFunction apply_linear(const GridFunction& f, std::initializer_list<LinearSymbol> ms) {
  GridFunction fh = fourier(f);
  for (auto it = std::rbegin(ms); it != std::rend(ms); ++it) fh = apply_linear_hat(std::move(fh), *it);
  return inverse(fh);
}

// ---------------------------------------------------------------- bilinear

// T_sigma(f, g)(x) = L^{-2n} sum_{xi, eta} sigma(xi, eta) fhat(xi) ghat(eta) e^{2 pi i x.(xi+eta)},
// evaluated as one inverse transform per eta.  eta slices are summed in fixed blocks and the
// blocks reduced in index order, so the result does not depend on the thread count.
template <class S>
GridFunction apply_bilinear(const GridFunction& f, const GridFunction& g, const S& sym) {
  require_same_spec(f, g, "apply_bilinear");
  f.require(Domain::space, "apply_bilinear");
  const GridSpec spec = f.spec;
  const std::size_t M = spec.size();
  const int N = spec.N;

  GridFunction fh = fourier(f), gh = fourier(g);
  auto ev = grid_evaluator(sym, spec);

  std::vector<std::size_t> fnz, etas;
  for (std::size_t i = 0; i < M; ++i)
    if (fh[i] != 0.0) fnz.push_back(i);
  for (std::size_t j = 0; j < M; ++j)
    if (gh[j] != 0.0) etas.push_back(j);

  std::vector<cplx> omega(static_cast<std::size_t>(N));
  for (int m = 0; m < N; ++m) omega[std::size_t(m)] = std::polar(1.0, 2.0 * pi * m / N);
  auto wrap = [N](long v) { return std::size_t(((v % N) + N) % N); };

  constexpr std::size_t block = 32;
  const std::size_t nblocks = (etas.size() + block - 1) / block;
  std::vector<std::vector<cplx>> partial(nblocks);
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
  for (long b = 0; b < long(nblocks); ++b) {
    try {
      std::vector<cplx> acc(M, 0.0), buf(M);
      for (std::size_t t = std::size_t(b) * block; t < std::min(etas.size(), std::size_t(b + 1) * block); ++t) {
        const std::size_t j = etas[t];
        std::fill(buf.begin(), buf.end(), cplx(0.0));
        for (std::size_t i : fnz) buf[i] = ev(i, j) * fh[i];
        inverse_inplace(spec, buf.data());
        const cplx gj = gh[j];
        if (spec.n == 1) {
          const long k = spec.wavenumber(int(j));
          const double sgn = (k & 1) ? -1.0 : 1.0;
          for (int i = 0; i < N; ++i) acc[std::size_t(i)] += gj * sgn * omega[wrap(long(i) * k)] * buf[std::size_t(i)];
        } else {
          const long k1 = spec.wavenumber(int(j / N)), k2 = spec.wavenumber(int(j % N));
          const double sgn = ((k1 + k2) & 1) ? -1.0 : 1.0;
          for (int i1 = 0; i1 < N; ++i1) {
            const cplx row = gj * sgn * omega[wrap(long(i1) * k1)];
            for (int i2 = 0; i2 < N; ++i2) {
              std::size_t idx = std::size_t(i1) * N + i2;
              acc[idx] += row * omega[wrap(long(i2) * k2)] * buf[idx];
            }
          }
        }
      }
      partial[std::size_t(b)] = std::move(acc);
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  GridFunction out(spec);
  for (const auto& part : partial)
    for (std::size_t i = 0; i < M; ++i) out[i] += part[i];
  const double c = 1.0 / spec.volume();
  for (auto& v : out.values) {
    v *= c;
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::domain_error("bilinear symbol produced a non-finite value");
  }
  return out;
}

// ---------------------------------------------------------------- translated kernels

using IVec = std::array<int, 2>;

struct TranslatedKernelFamily {
  std::function<double(double)> profile;  // radial spectrum of Psi
  double c1 = 0.5, c2 = 2.0;              // annulus containing that spectrum
  std::function<Vec(int, const IVec&)> zbar;
  int k_min = -5, k_max = 5;
};

// largest |k| with 2^k resolvable on the grid
inline int resolvable_k(const GridSpec& spec) { return int(std::floor(0.5 * std::log2(double(spec.N)))); }

inline TranslatedKernelFamily default_translated_family(const GridSpec& spec,
                                                        LpKind kind = LpKind::telescoping) {
  TranslatedKernelFamily fam;
  auto lp = build_lp_family(kind);
  fam.profile = [lp](double t) { return lp.psi(t); };
  fam.zbar = [](int k, const IVec& m) { return Vec{std::ldexp(double(m[0]), -k), std::ldexp(double(m[1]), -k)}; };
  fam.k_max = resolvable_k(spec);
  fam.k_min = -fam.k_max;
  return fam;
}

// Max of |profile| outside the annulus over a fine radial sample.
inline double annulus_leak(const TranslatedKernelFamily& fam, int samples = 4096) {
  double leak = 0.0;
  for (int i = 0; i <= samples; ++i) {
    double t = 4.0 * fam.c2 * i / samples;
    if (t <= fam.c1 || t >= fam.c2) leak = std::max(leak, std::abs(fam.profile(t)));
  }
  return leak;
}

// Psi_{k,m} * f with Psi_{k,m}(x) = 2^{kn} Psi(2^k (x + z_{k,m})).
inline GridFunction translated_convolution(const GridFunction& f, const TranslatedKernelFamily& fam, int k,
                                           const IVec& m) {
  f.require(Domain::space, "translated_convolution");
  if (std::abs(k) > resolvable_k(f.spec)) throw std::out_of_range("translated_convolution: k not resolvable on this grid");
  const Vec z = fam.zbar(k, m);
  GridFunction fh = fourier(f);
  for (std::size_t i = 0; i < fh.size(); ++i) {
    if (fh.spec.nyquist_index(i)) {
      fh[i] = 0.0;
      continue;
    }
    Vec xi = fh.spec.frequency(i);
    double r = std::ldexp(norm2(xi), -k);
    double prof = (r > 0.0) ? fam.profile(r) : 0.0;
    fh[i] *= prof * std::polar(1.0, 2.0 * pi * dot(xi, z));
  }
  return inverse(fh);
}

inline GridFunction translated_convolution(const GridFunction& f, const TranslatedKernelFamily& fam, int k, int m) {
  return translated_convolution(f, fam, k, IVec{m, 0});
}

// ---------------------------------------------------------------- Coifman-Meyer seminorm

struct CmOptions {
  int n = 1;              // dimension of xi and eta
  double rho_min = 0.125, rho_max = 8.0;
  int radii = 25;
  int directions = 64;    // angles (n = 1) or sphere points (n = 2)
  std::uint64_t seed = 12345;
};

namespace detail {

inline double binomial(int m, int i) {
  double c = 1.0;
  for (int t = 1; t <= i; ++t) c = c * (m - i + t) / t;
  return c;
}

// Tensor-product central difference of multi-index alpha (size 2n) at point p.
template <class F>
double mixed_central(const F& fn, std::vector<double> p, const std::vector<int>& alpha, double h, std::size_t axis) {
  if (axis == alpha.size()) return fn(p);
  int m = alpha[axis];
  if (m == 0) return mixed_central(fn, p, alpha, h, axis + 1);
  double acc = 0.0, base = p[axis];
  for (int i = 0; i <= m; ++i) {
    p[axis] = base + (0.5 * m - i) * h;
    double sgn = (i & 1) ? -1.0 : 1.0;
    acc += sgn * binomial(m, i) * mixed_central(fn, p, alpha, h, axis + 1);
  }
  return acc / std::pow(h, m);
}

inline void multi_indices(int dims, int max_order, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (int(cur.size()) == dims) {
    out.push_back(cur);
    return;
  }
  int used = 0;
  for (int v : cur) used += v;
  for (int v = 0; v + used <= max_order; ++v) {
    cur.push_back(v);
    multi_indices(dims, max_order, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

// max over |beta+gamma| <= max_order of sup (|xi|+|eta|)^{|beta+gamma|} |d^beta_xi d^gamma_eta sigma|,
// estimated on a log-spaced annular sample.  Each derivative is a central difference with step
// 1e-3 (|xi|+|eta|), Richardson-extrapolated once; orders above 3 use the larger step
// eps^{1/(order+2)} (|xi|+|eta|) where 1e-3 would be swamped by cancellation.
template <class S>
double cm_seminorm(const S& sigma, int max_order, const CmOptions& opt = {}) {
  const int dims = 2 * opt.n;
  if (max_order < 0 || max_order > 2 * opt.n + 1) throw std::invalid_argument("cm_seminorm: max_order must be in [0, 2n+1]");

  auto eval = [&](const std::vector<double>& p) {
    Vec xi{p[0], opt.n == 2 ? p[1] : 0.0};
    Vec eta{p[std::size_t(opt.n)], opt.n == 2 ? p[3] : 0.0};
    cplx v = sigma(xi, eta);
    return v;
  };

  std::vector<std::vector<double>> dirs;
  if (opt.n == 1) {
    for (int a = 0; a < opt.directions; ++a) {
      double th = 2.0 * pi * (a + 0.5) / opt.directions;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
  } else {
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss;
    for (int a = 0; a < opt.directions; ++a) {
      std::vector<double> d(4);
      double r = 0.0;
      for (auto& v : d) r += (v = gauss(rng)) * v;
      for (auto& v : d) v /= std::sqrt(r);
      dirs.push_back(d);
    }
  }

  std::vector<std::vector<int>> alphas;
  std::vector<int> cur;
  detail::multi_indices(dims, max_order, cur, alphas);

  double best = 0.0;
  for (int ri = 0; ri < opt.radii; ++ri) {
    double rho = opt.radii == 1 ? opt.rho_min
                                : opt.rho_min * std::pow(opt.rho_max / opt.rho_min, double(ri) / (opt.radii - 1));
    for (const auto& d : dirs) {
      std::vector<double> p(static_cast<std::size_t>(dims));
      for (int c = 0; c < dims; ++c) p[std::size_t(c)] = rho * d[std::size_t(c)];
      double nx = 0.0, ny = 0.0;
      for (int c = 0; c < opt.n; ++c) {
        nx += p[std::size_t(c)] * p[std::size_t(c)];
        ny += p[std::size_t(c + opt.n)] * p[std::size_t(c + opt.n)];
      }
      const double scale = std::sqrt(nx) + std::sqrt(ny);
      for (const auto& a : alphas) {
        int order = 0;
        for (int v : a) order += v;
        double val;
        if (order == 0) {
          val = std::abs(eval(p));
        } else {
          double rel = std::max(1e-3, std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (order + 2)));
          double h = rel * scale;
          auto re = [&](const std::vector<double>& q) { return eval(q).real(); };
          auto im = [&](const std::vector<double>& q) { return eval(q).imag(); };
          double r1 = detail::mixed_central(re, p, a, h, 0), r2 = detail::mixed_central(re, p, a, 0.5 * h, 0);
          double i1 = detail::mixed_central(im, p, a, h, 0), i2 = detail::mixed_central(im, p, a, 0.5 * h, 0);
          double dr = (4.0 * r2 - r1) / 3.0, di = (4.0 * i2 - i1) / 3.0;
          val = std::hypot(dr, di) * std::pow(scale, order);
        }
        if (!std::isfinite(val)) throw std::domain_error("cm_seminorm: non-finite derivative estimate");
        best = std::max(best, val);
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------- H^{(s,t)} norms of dyadic pieces

struct DyadicWindow {
  std::function<double(double)> radial;  // Psi(xi, eta) = radial(|(xi, eta)|)
  double inner = 0.5, outer = 2.0;
};

inline DyadicWindow default_window() {
  return {[](double r) { return psi_profile(r); }, 0.5, 2.0};
}

// || sigma(2^k .) Psi ||_{H^{(s,t)}} for a symbol on R x R, sampled on an n = 2 grid in (xi, eta).
template <class S>
double hst_norm(const S& sigma, double s, double t, int k, const DyadicWindow& window = default_window(),
                const GridSpec& sample_grid = GridSpec(2, 128, 8.0)) {
  if (sample_grid.n != 2) throw std::invalid_argument("hst_norm: sample grid must be two-dimensional");
  if (sample_grid.L < 2.0 * window.outer) throw std::invalid_argument("hst_norm: sample box does not contain the window");
  const double scale = std::ldexp(1.0, k);
  GridFunction F(sample_grid);
  for (std::size_t i = 0; i < F.size(); ++i) {
    Vec p = sample_grid.point(i);
    double r = norm2(p);
    double w = window.radial(r);
    if ((r <= window.inner || r >= window.outer) && std::abs(w) > 1e-12)
      throw std::invalid_argument("hst_norm: window not annulus-supported");
    if (w == 0.0) continue;
    F[i] = w * cplx(sigma(Vec{scale * p[0], 0.0}, Vec{scale * p[1], 0.0}));
  }
  GridFunction Fh = fourier(F);
  double acc = 0.0;
  for (std::size_t i = 0; i < Fh.size(); ++i) {
    Vec tau = sample_grid.frequency(i);
    acc += std::pow(1.0 + tau[0] * tau[0], s) * std::pow(1.0 + tau[1] * tau[1], t) * std::norm(Fh[i]);
  }
  return std::sqrt(acc / sample_grid.volume());
}

}  // namespace fl
