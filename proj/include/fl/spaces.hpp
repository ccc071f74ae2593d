// Norms on grid functions: weighted L^p, weighted Lorentz, Morrey and variable-exponent
// Lebesgue spaces, plus constructors for exponent functions.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fl/fft.hpp"
#include "fl/testfn.hpp"

namespace fl {

// ---------------------------------------------------------------- exponents

struct LogHolder {
  double C0 = 0.0, Cinf = 0.0, pinf = 0.0;
};

struct ExponentFunction {
  GridFunction samples;  // real values in (0, inf)
  double p_minus = 0.0, p_plus = 0.0;
  std::optional<LogHolder> loghoelder;
  std::string kind = "custom";

  double operator[](std::size_t i) const { return samples[i].real(); }
  std::size_t size() const { return samples.size(); }
  const GridSpec& spec() const { return samples.spec; }
  bool is_constant() const { return p_minus == p_plus; }
};

inline ExponentFunction make_exponent_from(GridFunction samples, std::string kind = "custom") {
  ExponentFunction e;
  e.kind = std::move(kind);
  e.p_minus = std::numeric_limits<double>::infinity();
  e.p_plus = 0.0;
  for (auto& v : samples.values) {
    double p = v.real();
    if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("exponent samples must be finite and positive");
    v = p;
    e.p_minus = std::min(e.p_minus, p);
    e.p_plus = std::max(e.p_plus, p);
  }
  e.samples = std::move(samples);
  return e;
}

inline ExponentFunction constant_exponent(const GridSpec& spec, double p0) {
  return make_exponent_from(constant(spec, p0), "constant");
}

// p_left where x_0 < split, p_right elsewhere
inline ExponentFunction two_value_exponent(const GridSpec& spec, double p_left, double p_right, double split = 0.0) {
  return make_exponent_from(sample(spec, [&](const Vec& x) { return x[0] < split ? p_left : p_right; }), "two_value");
}

namespace detail {
inline double min_image(const GridSpec& spec, const Vec& a, const Vec& b) {
  double d2 = 0.0;
  for (int k = 0; k < spec.n; ++k) {
    double d = wrap_dx(a[k] - b[k], spec.L);
    d2 += d * d;
  }
  return std::sqrt(d2);
}
}  // namespace detail

// Checks both log-Hoelder inequalities on every grid pair (local one for |x-y| < 1/2,
// distances taken on the torus).  Returns the largest violation (<= 0 means certified).
inline double loghoelder_violation(const ExponentFunction& p, const LogHolder& c) {
  const GridSpec& spec = p.spec();
  double worst = -std::numeric_limits<double>::infinity();
  const int reach = int(std::ceil(0.5 / spec.h()));
  const int N = spec.N;
  for (std::size_t i = 0; i < p.size(); ++i) {
    Vec x = spec.point(i);
    worst = std::max(worst, std::abs(p[i] - c.pinf) - c.Cinf / std::log(std::exp(1.0) + norm2(x)));
    int i0 = spec.n == 1 ? int(i) : int(i / N), i1 = spec.n == 1 ? 0 : int(i % N);
    for (int a = -reach; a <= reach; ++a) {
      for (int b = (spec.n == 2 ? -reach : 0); b <= (spec.n == 2 ? reach : 0); ++b) {
        if (a == 0 && b == 0) continue;
        std::size_t j = spec.n == 1 ? std::size_t(((i0 + a) % N + N) % N)
                                    : std::size_t(((i0 + a) % N + N) % N) * N + std::size_t(((i1 + b) % N + N) % N);
        double d = detail::min_image(spec, x, spec.point(j));
        if (d >= 0.5) continue;
        worst = std::max(worst, std::abs(p[i] - p[j]) - c.C0 / (-std::log(d)));
      }
    }
  }
  return worst;
}

// p(x) = p_inf + Cinf / log(e + |x|); the local constant C0 is certified on the grid.
inline ExponentFunction smooth_loghoelder_exponent(const GridSpec& spec, double C0, double Cinf, double pinf) {
  if (!(pinf > 0.0) || Cinf < 0.0) throw std::invalid_argument("smooth_loghoelder: need p_inf > 0 and C_inf >= 0");
  auto e = make_exponent_from(
      sample(spec, [&](const Vec& x) { return pinf + Cinf / std::log(std::exp(1.0) + norm2(x)); }), "smooth_loghoelder");
  LogHolder c{C0, Cinf, pinf};
  if (loghoelder_violation(e, c) > 1e-12) throw std::runtime_error("smooth_loghoelder: certificate check failed for C0");
  e.loghoelder = c;
  return e;
}

// 1/p + 1/p' = 1
inline ExponentFunction conjugate(const ExponentFunction& p) {
  if (!(p.p_minus > 1.0)) throw std::invalid_argument("conjugate exponent needs p_minus > 1");
  GridFunction s = p.samples;
  for (auto& v : s.values) v = v.real() / (v.real() - 1.0);
  return make_exponent_from(std::move(s), "conjugate(" + p.kind + ")");
}

// p(.) / c
inline ExponentFunction divided(const ExponentFunction& p, double c) {
  GridFunction s = scaled(p.samples, 1.0 / c);
  return make_exponent_from(std::move(s), p.kind);
}

// r(.) with 1/r = 1/p + 1/q
inline ExponentFunction harmonic_sum(const ExponentFunction& p, const ExponentFunction& q) {
  GridFunction s(p.spec());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = 1.0 / (1.0 / p[i] + 1.0 / q[i]);
  return make_exponent_from(std::move(s), "harmonic");
}

// ---------------------------------------------------------------- weighted L^p

inline double weighted_lp_norm(const GridFunction& f, double p, const GridFunction* w = nullptr) {
  if (!(p > 0.0)) throw std::invalid_argument("weighted_lp_norm: p must be positive");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double a = std::abs(f[i]);
    if (a == 0.0) continue;
    s += std::pow(a, p) * (w ? (*w)[i].real() : 1.0);
  }
  return std::pow(s * f.spec.cell(), 1.0 / p);
}

inline double weighted_lp_norm(const GridFunction& f, double p, const GridFunction& w) {
  return weighted_lp_norm(f, p, &w);
}

// ---------------------------------------------------------------- Lorentz

// f*_w as a step function: value[j] on [T[j-1], T[j]), T[-1] = 0, values strictly decreasing.
struct Rearrangement {
  std::vector<double> value, T;

  double operator()(double t) const {
    auto it = std::upper_bound(T.begin(), T.end(), t);
    return it == T.end() ? 0.0 : value[std::size_t(it - T.begin())];
  }
};

inline Rearrangement rearrangement(const GridFunction& f, const GridFunction* w = nullptr) {
  std::vector<std::pair<double, double>> vm;  // (|f|, measure)
  vm.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double a = std::abs(f[i]);
    if (a > 0.0) vm.emplace_back(a, f.spec.cell() * (w ? (*w)[i].real() : 1.0));
  }
  std::sort(vm.begin(), vm.end(), [](auto& a, auto& b) { return a.first > b.first; });
  Rearrangement r;
  double acc = 0.0;
  for (std::size_t i = 0; i < vm.size(); ++i) {
    acc += vm[i].second;
    if (i + 1 == vm.size() || vm[i + 1].first != vm[i].first) {
      r.value.push_back(vm[i].first);
      r.T.push_back(acc);
    }
  }
  return r;
}

inline Rearrangement rearrangement(const GridFunction& f, const GridFunction& w) { return rearrangement(f, &w); }

// (int_0^inf (t^{1/p} f*_w(t))^a dt/t)^{1/a}, exact for step data; a = inf gives sup_t t^{1/p} f*_w(t)
inline double lorentz_norm(const GridFunction& f, double p, double a, const GridFunction* w = nullptr) {
  if (!(p > 0.0) || !(a > 0.0)) throw std::invalid_argument("lorentz_norm: need p > 0 and a > 0");
  auto r = rearrangement(f, w);
  if (std::isinf(a)) {
    double m = 0.0;
    for (std::size_t j = 0; j < r.value.size(); ++j) m = std::max(m, std::pow(r.T[j], 1.0 / p) * r.value[j]);
    return m;
  }
  double s = 0.0, prev = 0.0;
  for (std::size_t j = 0; j < r.value.size(); ++j) {
    double cur = std::pow(r.T[j], a / p);
    s += std::pow(r.value[j], a) * (p / a) * (cur - prev);
    prev = cur;
  }
  return std::pow(s, 1.0 / a);
}

inline double lorentz_norm(const GridFunction& f, double p, double a, const GridFunction& w) {
  return lorentz_norm(f, p, a, &w);
}

// ---------------------------------------------------------------- Morrey

struct MorreyResult {
  double value = 0.0;
  std::size_t center = 0;  // 1D: first index of the interval; 2D: flat centre index
  double size = 0.0;       // 1D: interval length; 2D: disc radius (inf for the whole torus)
};

// sup over grid balls of (|B|^{kappa/n - 1} int_B |f|^p)^{1/p}.  1D balls are all periodic
// intervals of whole cells; 2D balls are discrete discs about grid points of every radius
// j h, j < N/2, plus the whole torus.
inline MorreyResult morrey_norm(const GridFunction& f, double p, double kappa) {
  const GridSpec& spec = f.spec;
  if (!(p > 0.0)) throw std::invalid_argument("morrey_norm: p must be positive");
  if (!(kappa > 0.0) || kappa > spec.n) throw std::invalid_argument("morrey_norm: need 0 < kappa <= n");
  const double expo = kappa / spec.n - 1.0;
  const int N = spec.N;
  MorreyResult best;
  std::vector<double> fp(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) fp[i] = std::pow(std::abs(f[i]), p);

  auto consider = [&](double integral, double measure, std::size_t where, double size) {
    double v = std::pow(measure, expo) * integral;
    if (v > best.value) best = {v, where, size};
  };

  if (spec.n == 1) {
    std::vector<double> pre(2 * std::size_t(N) + 1, 0.0);
    for (int i = 0; i < 2 * N; ++i) pre[std::size_t(i) + 1] = pre[std::size_t(i)] + fp[std::size_t(i % N)];
    for (int len = 1; len < N; ++len)
      for (int s = 0; s < N; ++s)
        consider((pre[std::size_t(s + len)] - pre[std::size_t(s)]) * spec.h(), len * spec.h(), std::size_t(s), len * spec.h());
    consider(pre[std::size_t(N)] * spec.h(), spec.L, 0, spec.L);
  } else {
    const std::size_t M = f.size();
    std::vector<cplx> Fh(fp.begin(), fp.end());
    detail::dft_inplace(spec, Fh.data(), FFTW_FORWARD);
    double total = std::accumulate(fp.begin(), fp.end(), 0.0) * spec.cell();
    std::vector<cplx> K(M), S(M);
    for (int j = 0; j < N / 2; ++j) {
      const double rad = j * spec.h();
      // disc of radius j cells about index (0, 0)
      std::fill(K.begin(), K.end(), cplx(0.0));
      std::size_t count = 0;
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
          int da = a <= N / 2 ? a : a - N, db = b <= N / 2 ? b : b - N;
          if (double(da) * da + double(db) * db <= double(j) * j + 1e-9) {
            K[std::size_t(a) * N + b] = 1.0;
            ++count;
          }
        }
      // circular correlation S[c] = sum_y K(y - c) F(y) with unnormalized transforms
      detail::dft_inplace(spec, K.data(), FFTW_FORWARD);
      for (std::size_t i = 0; i < M; ++i) S[i] = Fh[i] * std::conj(K[i]);
      detail::dft_inplace(spec, S.data(), FFTW_BACKWARD);
      const double measure = double(count) * spec.cell();
      for (std::size_t c = 0; c < M; ++c)
        consider(std::max(0.0, S[c].real()) / double(M) * spec.cell(), measure, c, rad);
    }
    consider(total, spec.volume(), 0, std::numeric_limits<double>::infinity());
  }
  best.value = std::pow(best.value, 1.0 / p);
  return best;
}

// ---------------------------------------------------------------- variable exponents

inline double variable_modular(const GridFunction& f, const ExponentFunction& p) {
  if (!(f.spec == p.spec())) throw std::invalid_argument("variable_modular: grid spec mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double a = std::abs(f[i]);
    if (a != 0.0) s += std::pow(a, p[i]);
  }
  return s * f.spec.cell();
}

// Luxemburg norm inf{lambda : rho(f / lambda) <= 1} by geometric bisection
inline double variable_norm(const GridFunction& f, const ExponentFunction& p, double rel_tol = 1e-13) {
  if (!std::isfinite(p.p_plus)) throw std::invalid_argument("variable_norm: p_plus must be finite");
  if (max_abs(f) == 0.0) return 0.0;
  auto rho = [&](double lam) { return variable_modular(scaled(f, 1.0 / lam), p); };
  double hi = weighted_lp_norm(f, p.p_minus) + weighted_lp_norm(f, p.p_plus) + 1.0;
  int guard = 0;
  while (!(rho(hi) <= 1.0)) {
    if (++guard > 200) throw std::domain_error("variable_norm: modular not finite at any lambda");
    hi *= 2.0;
  }
  double lo = hi;
  while (rho(lo) <= 1.0) {
    lo *= 0.5;
    if (lo < 1e-300) throw std::domain_error("variable_norm: bracket collapsed");
  }
  while (hi / lo - 1.0 > rel_tol) {
    double mid = std::sqrt(lo * hi);
    if (rho(mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

inline void require_exponent_identity(const ExponentFunction& p, const ExponentFunction& q, const ExponentFunction& r) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (std::abs(1.0 / r[i] - 1.0 / p[i] - 1.0 / q[i]) > 1e-12)
      throw std::invalid_argument("exponent identity 1/r = 1/p + 1/q violated");
}

// ||fg||_{r(.)} / (||f||_{p(.)} ||g||_{q(.)})
inline double holder_defect(const GridFunction& f, const GridFunction& g, const ExponentFunction& p,
                            const ExponentFunction& q, const ExponentFunction& r) {
  require_exponent_identity(p, q, r);
  double den = variable_norm(f, p) * variable_norm(g, q);
  if (den == 0.0) throw std::invalid_argument("holder_defect: zero factor");
  return variable_norm(pointwise_product(f, g), r) / den;
}

// conj(sgn f) |f / ||f||_{p(.)}|^{p(.) - 1}: attains int f g = ||f||_{p(.)} with ||g||_{p'(.)} = 1
inline GridFunction dual_witness(const GridFunction& f, const ExponentFunction& p) {
  double lam = variable_norm(f, p);
  GridFunction g(f.spec);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double a = std::abs(f[i]);
    if (a == 0.0) continue;
    g[i] = std::conj(f[i] / a) * std::pow(a / lam, p[i] - 1.0);
  }
  return g;
}

// max over witnesses g of |int f g| / ||g||_{p'(.)}
inline double dual_norm_estimate(const GridFunction& f, const ExponentFunction& p, int n_witnesses,
                                 std::uint64_t seed = 1, bool nonnegative_witnesses = false) {
  if (!(p.p_minus > 1.0)) throw std::invalid_argument("dual_norm_estimate: needs p_minus > 1");
  const auto pc = conjugate(p);
  auto ratio = [&](GridFunction g) {
    if (nonnegative_witnesses) g = modulus(g);
    double gn = variable_norm(g, pc);
    if (gn == 0.0) return 0.0;
    cplx s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
    return std::abs(s) * f.spec.cell() / gn;
  };
  GridFunction g0 = dual_witness(f, p);
  double best = ratio(g0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int k = 0; k < n_witnesses; ++k) {
    if (k % 2 == 0) {
      best = std::max(best, ratio(random_bandlimited(f.spec, rng(), 0.0, true, false)));
    } else {
      GridFunction g = g0;  // positive multiplicative perturbation of the analytic witness
      for (auto& v : g.values) v *= 1.0 + 0.5 * unif(rng);
      best = std::max(best, ratio(g));
    }
  }
  return best;
}

}  // namespace fl
