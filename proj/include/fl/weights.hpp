// Weights, the dyadic-free maximal operator over grid cubes, A_p characteristics,
// Rubio de Francia iteration, ball averages and Rademacher functions.
#pragma once

#include <deque>
#include <functional>

#include "fl/spaces.hpp"

namespace fl {

// ---------------------------------------------------------------- weights

enum class WeightKind { constant, power, two_value, custom };

struct Weight {
  GridFunction samples;
  WeightKind kind = WeightKind::custom;
  double a = 0.0;      // power exponent
  double t = 1.0;      // two-value ratio
  double split = 0.0;  // two-value split point

  double operator[](std::size_t i) const { return samples[i].real(); }
  const GridSpec& spec() const { return samples.spec; }

  void validate() const {
    for (const auto& v : samples.values)
      if (!(v.real() > 0.0) || !std::isfinite(v.real())) throw std::invalid_argument("weight samples must be finite and positive");
  }
};

inline Weight custom_weight(GridFunction samples) {
  Weight w{std::move(samples)};
  for (auto& v : w.samples.values) v = v.real();
  w.validate();
  return w;
}

inline Weight constant_weight(const GridSpec& spec, double c = 1.0) {
  Weight w{constant(spec, c), WeightKind::constant};
  w.validate();
  return w;
}

// |x|^a.  1D samples are exact cell averages over [x_j - h/2, x_j + h/2], so the origin cell
// is finite for a > -1.  2D samples are point values except at the origin, which gets the
// average over the disc of area h^2.
inline Weight power_weight(const GridSpec& spec, double a) {
  if (!(a > -spec.n)) throw std::invalid_argument("power weight needs a > -n to be locally integrable");
  Weight w{GridFunction(spec), WeightKind::power, a};
  const double h = spec.h();
  if (spec.n == 1) {
    auto F = [a](double x) { return std::copysign(std::pow(std::abs(x), a + 1.0), x) / (a + 1.0); };
    for (int j = 0; j < spec.N; ++j) {
      double x = spec.x(j);
      w.samples[std::size_t(j)] = (F(x + 0.5 * h) - F(x - 0.5 * h)) / h;
    }
  } else {
    const double rho = h / std::sqrt(pi);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      double r = norm2(spec.point(i));
      w.samples[i] = r < 0.5 * h ? 2.0 * std::pow(rho, a) / (a + 2.0) : std::pow(r, a);
    }
  }
  w.validate();
  return w;
}

// 1 where x_0 < split, t elsewhere
inline Weight two_value_weight(const GridSpec& spec, double t, double split = 0.0) {
  if (!(t > 0.0)) throw std::invalid_argument("two-value weight needs t > 0");
  Weight w{sample(spec, [&](const Vec& x) { return x[0] < split ? 1.0 : t; }), WeightKind::two_value, 0.0, t, split};
  w.validate();
  return w;
}

// ---------------------------------------------------------------- cube scans

// A grid cube: start index per axis and side length in cells, periodic.
struct Cube {
  int start0 = 0, start1 = 0, side = 0;
};

namespace detail {

// sliding max (or min) over circular windows [s, s + len) of a length-N array; out[i] is the
// best over windows containing i, i.e. starts i - len + 1 .. i
inline void circular_window_extreme(const std::vector<double>& a, int len, bool want_max, std::vector<double>& out) {
  const int N = int(a.size());
  out.assign(std::size_t(N), 0.0);
  std::deque<int> dq;
  auto better = [&](double x, double y) { return want_max ? x >= y : x <= y; };
  // the window of starts for i is [i - len + 1, i]
  for (int k = -len + 1; k < N; ++k) {
    int idx = ((k % N) + N) % N;
    while (!dq.empty() && better(a[std::size_t(idx)], a[std::size_t(((dq.back() % N) + N) % N)])) dq.pop_back();
    dq.push_back(k);
    while (dq.front() < k - len + 1) dq.pop_front();
    if (k >= 0) out[std::size_t(k)] = a[std::size_t(((dq.front() % N) + N) % N)];
  }
}

// window sums over circular windows starting at each index (1D), or over len x len squares
// with top-left corner at each index (2D)
inline std::vector<double> window_sums(const GridSpec& spec, const std::vector<double>& v, int len) {
  const int N = spec.N;
  std::vector<double> out(v.size());
  if (spec.n == 1) {
    std::vector<double> pre(2 * std::size_t(N) + 1, 0.0);
    for (int i = 0; i < 2 * N; ++i) pre[std::size_t(i) + 1] = pre[std::size_t(i)] + v[std::size_t(i % N)];
    for (int s = 0; s < N; ++s) out[std::size_t(s)] = pre[std::size_t(s + len)] - pre[std::size_t(s)];
    return out;
  }
  // row sums then column sums
  std::vector<double> rows(v.size());
  std::vector<double> pre(2 * std::size_t(N) + 1);
  for (int r = 0; r < N; ++r) {
    for (int i = 0; i < 2 * N; ++i) pre[std::size_t(i) + 1] = pre[std::size_t(i)] + v[std::size_t(r) * N + std::size_t(i % N)];
    for (int s = 0; s < N; ++s) rows[std::size_t(r) * N + s] = pre[std::size_t(s + len)] - pre[std::size_t(s)];
  }
  for (int c = 0; c < N; ++c) {
    for (int i = 0; i < 2 * N; ++i) pre[std::size_t(i) + 1] = pre[std::size_t(i)] + rows[std::size_t(i % N) * N + c];
    for (int s = 0; s < N; ++s) out[std::size_t(s) * N + c] = pre[std::size_t(s + len)] - pre[std::size_t(s)];
  }
  return out;
}

// window min over len-cubes with corner at each index
inline std::vector<double> window_min(const GridSpec& spec, const std::vector<double>& v, int len) {
  const int N = spec.N;
  auto reverse_extreme = [&](const std::vector<double>& line, std::vector<double>& out) {
    // min over [s, s + len): reuse the "windows containing i" scan on the reversed index
    std::vector<double> rev(line.rbegin(), line.rend()), tmp;
    circular_window_extreme(rev, len, false, tmp);
    out.resize(line.size());
    for (int s = 0; s < N; ++s) out[std::size_t(s)] = tmp[std::size_t(N - 1 - s)];
  };
  std::vector<double> out(v.size()), line(static_cast<std::size_t>(N)), res;
  if (spec.n == 1) {
    reverse_extreme(v, out);
    return out;
  }
  std::vector<double> rows(v.size());
  for (int r = 0; r < N; ++r) {
    for (int i = 0; i < N; ++i) line[std::size_t(i)] = v[std::size_t(r) * N + i];
    reverse_extreme(line, res);
    for (int i = 0; i < N; ++i) rows[std::size_t(r) * N + i] = res[std::size_t(i)];
  }
  for (int c = 0; c < N; ++c) {
    for (int i = 0; i < N; ++i) line[std::size_t(i)] = rows[std::size_t(i) * N + c];
    reverse_extreme(line, res);
    for (int i = 0; i < N; ++i) out[std::size_t(i) * N + c] = res[std::size_t(i)];
  }
  return out;
}

// for each point, max over len-cubes containing it of the per-corner values a
inline std::vector<double> containing_max(const GridSpec& spec, const std::vector<double>& a, int len) {
  const int N = spec.N;
  std::vector<double> out(a.size()), line(static_cast<std::size_t>(N)), res;
  if (spec.n == 1) {
    circular_window_extreme(a, len, true, out);
    return out;
  }
  std::vector<double> rows(a.size());
  for (int r = 0; r < N; ++r) {
    for (int i = 0; i < N; ++i) line[std::size_t(i)] = a[std::size_t(r) * N + i];
    circular_window_extreme(line, len, true, res);
    for (int i = 0; i < N; ++i) rows[std::size_t(r) * N + i] = res[std::size_t(i)];
  }
  for (int c = 0; c < N; ++c) {
    for (int i = 0; i < N; ++i) line[std::size_t(i)] = rows[std::size_t(i) * N + c];
    circular_window_extreme(line, len, true, res);
    for (int i = 0; i < N; ++i) out[std::size_t(i) * N + c] = res[std::size_t(i)];
  }
  return out;
}

inline double cube_count(const GridSpec& spec, int len) { return spec.n == 1 ? double(len) : double(len) * len; }

}  // namespace detail

// M f(x) = max over periodic grid cubes Q containing x of the discrete average of |f| on Q.
inline GridFunction maximal(const GridFunction& f) {
  f.require(Domain::space, "maximal");
  const GridSpec& spec = f.spec;
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::abs(f[i]);
  std::vector<double> best(a);
  for (int len = 2; len <= spec.N; ++len) {
    auto sums = detail::window_sums(spec, a, len);
    const double inv = 1.0 / detail::cube_count(spec, len);
    for (auto& v : sums) v *= inv;
    auto m = detail::containing_max(spec, sums, len);
    for (std::size_t i = 0; i < best.size(); ++i) best[i] = std::max(best[i], m[i]);
  }
  GridFunction out(spec);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = best[i];
  return out;
}

inline GridFunction maximal_power(const GridFunction& f, int k) {
  GridFunction out = modulus(f);
  for (int i = 0; i < k; ++i) out = maximal(out);
  return out;
}

// ---------------------------------------------------------------- A_p

struct ApReport {
  double p = 1.0;
  double characteristic = 1.0;
  Cube witness;
};

// exact max over all periodic grid cubes of (avg w)(avg w^{-1/(p-1)})^{p-1}, or
// (avg w) max w^{-1} for p = 1
inline ApReport ap_characteristic(const Weight& w, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("ap_characteristic: p must be >= 1");
  const GridSpec& spec = w.spec();
  const int N = spec.N;
  std::vector<double> a(w.samples.size()), b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = w[i];
    b[i] = p == 1.0 ? w[i] : std::pow(w[i], -1.0 / (p - 1.0));
    if (!std::isfinite(b[i]) || b[i] == 0.0) throw std::overflow_error("ap_characteristic: weight power overflows");
  }
  ApReport rep;
  rep.p = p;
  rep.characteristic = 0.0;
  for (int len = 1; len <= N; ++len) {
    const double cnt = detail::cube_count(spec, len);
    auto sa = detail::window_sums(spec, a, len);
    std::vector<double> second = p == 1.0 ? detail::window_min(spec, b, len) : detail::window_sums(spec, b, len);
    for (std::size_t s = 0; s < sa.size(); ++s) {
      double v = p == 1.0 ? (sa[s] / cnt) / second[s] : (sa[s] / cnt) * std::pow(second[s] / cnt, p - 1.0);
      if (!std::isfinite(v)) throw std::overflow_error("ap_characteristic: characteristic overflows");
      if (v > rep.characteristic) {
        rep.characteristic = v;
        rep.witness = {spec.n == 1 ? int(s) : int(s / std::size_t(N)), spec.n == 1 ? 0 : int(s % std::size_t(N)), len};
      }
    }
  }
  return rep;
}

inline double a1_characteristic(const GridFunction& w) { return ap_characteristic(custom_weight(w), 1.0).characteristic; }

// ---------------------------------------------------------------- Rubio de Francia

// Largest observed ||M f|| / ||f|| over seeded nonnegative probes (and any extra functions),
// inflated by a safety factor.
inline double estimate_maximal_norm(const GridSpec& spec, const std::function<double(const GridFunction&)>& norm,
                                    int probes = 100, std::uint64_t seed = 7, const std::vector<GridFunction>& extra = {},
                                    double inflate = 1.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double best = 1.0;
  auto probe = [&](const GridFunction& f) {
    double d = norm(f);
    if (d > 0.0) best = std::max(best, norm(maximal(f)) / d);
  };
  for (int k = 0; k < probes; ++k) {
    GridFunction f(spec);
    switch (k % 3) {
      case 0:
        f = modulus(random_bandlimited(spec, rng()));
        break;
      case 1: {  // indicator of a random cube
        int side = 1 + int(unif(rng) * spec.N / 4);
        int s0 = int(unif(rng) * spec.N), s1 = int(unif(rng) * spec.N);
        for (int i = 0; i < side; ++i)
          for (int j = 0; j < (spec.n == 2 ? side : 1); ++j) {
            std::size_t idx = spec.n == 1 ? std::size_t((s0 + i) % spec.N)
                                          : std::size_t((s0 + i) % spec.N) * spec.N + std::size_t((s1 + j) % spec.N);
            f[idx] = 1.0;
          }
        break;
      }
      default: {  // narrow bump
        Vec c{(unif(rng) - 0.5) * spec.L, (unif(rng) - 0.5) * spec.L};
        double width = spec.h() * (1.0 + 8.0 * unif(rng));
        f = sample(spec, [&](const Vec& x) {
          double d = detail::min_image(spec, x, c) / width;
          return std::exp(-pi * d * d);
        });
      }
    }
    probe(f);
  }
  for (const auto& f : extra) probe(modulus(f));
  return inflate * best;
}

struct RubioResult {
  GridFunction R;
  double tail = 0.0;  // ||M^K tau|| / (2A)^K * 2
  double eps = 0.0;   // max M^{K+1} tau / ((2A)^{K+1} R)
};

// R = sum_{k=0}^{K} M^k tau / (2A)^k.  Since M R <= 2A (R + M^{K+1} tau / (2A)^{K+1}) pointwise,
// [R]_{A_1} <= 2A (1 + eps) whatever the value of A.
inline RubioResult rubio_iterate(const GridFunction& tau, const ExponentFunction& pbar_conj, double A, int K = 12) {
  if (!(A > 0.0)) throw std::invalid_argument("rubio_iterate: A must be positive");
  if (K < 1) throw std::invalid_argument("rubio_iterate: K must be >= 1");
  for (const auto& v : tau.values)
    if (v.real() < 0.0 || v.imag() != 0.0) throw std::invalid_argument("rubio_iterate: tau must be nonnegative");
  RubioResult out;
  GridFunction term = tau, acc = tau;
  double scale = 1.0;
  for (int k = 1; k <= K; ++k) {
    term = maximal(term);
    scale /= 2.0 * A;
    acc = acc + scaled(term, scale);
  }
  out.tail = variable_norm(term, pbar_conj) * scale * 2.0;
  GridFunction next = maximal(term);
  const double nscale = scale / (2.0 * A);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    double r = acc[i].real();
    if (!std::isfinite(r)) throw std::domain_error("rubio_iterate: non-finite iterate");
    if (r > 0.0) out.eps = std::max(out.eps, next[i].real() * nscale / r);
  }
  out.R = std::move(acc);
  return out;
}

// ---------------------------------------------------------------- ball averages

// |B|^{-1} (chi_B * f) with B = B(center, radius), via the exact transform of the ball.
inline GridFunction average_over_ball(const GridFunction& f, const Vec& center, double radius) {
  f.require(Domain::space, "average_over_ball");
  const GridSpec& spec = f.spec;
  if (radius < spec.h() * (1.0 - 1e-12)) throw std::invalid_argument("average_over_ball: radius below grid spacing");
  if (radius > 0.5 * spec.L) throw std::invalid_argument("average_over_ball: radius exceeds L/2");
  const double vol = spec.n == 1 ? 2.0 * radius : pi * radius * radius;
  GridFunction fh = fourier(f);
  for (std::size_t i = 0; i < fh.size(); ++i) {
    if (spec.nyquist_index(i)) {
      fh[i] = 0.0;
      continue;
    }
    Vec xi = spec.frequency(i);
    double r = norm2(xi), chi;
    if (r == 0.0)
      chi = vol;
    else if (spec.n == 1)
      chi = std::sin(2.0 * pi * radius * xi[0]) / (pi * xi[0]);
    else
      chi = radius * std::cyl_bessel_j(1.0, 2.0 * pi * radius * r) / r;
    fh[i] *= chi / vol * std::polar(1.0, -2.0 * pi * dot(center, xi));
  }
  return inverse(fh);
}

// Radially decreasing step function sum_i c_i chi_{B(0, r_i)}, c_i >= 0.
struct Staircase {
  std::vector<double> radii, coeffs;

  double l1_norm(int n) const {
    double s = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) s += coeffs[i] * (n == 1 ? 2.0 * radii[i] : pi * radii[i] * radii[i]);
    return s;
  }
  double operator()(double r) const {
    double s = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i)
      if (r <= radii[i]) s += coeffs[i];
    return s;
  }
};

// lower staircase of exp(-pi r^2 / width^2) with the given level radii
inline Staircase gaussian_staircase(double width, const std::vector<double>& radii) {
  Staircase st;
  st.radii = radii;
  std::sort(st.radii.begin(), st.radii.end());
  auto G = [width](double r) { return std::exp(-pi * r * r / (width * width)); };
  for (std::size_t i = 0; i < st.radii.size(); ++i) {
    double next = i + 1 < st.radii.size() ? G(st.radii[i + 1]) : 0.0;
    st.coeffs.push_back(G(st.radii[i]) - next);
  }
  return st;
}

// tau_z(Phi) * f = sum_i c_i |B_i| (average of f over B(z, r_i))
inline GridFunction apply_staircase(const GridFunction& f, const Staircase& st, const Vec& z) {
  GridFunction out(f.spec);
  for (std::size_t i = 0; i < st.radii.size(); ++i) {
    double vol = f.spec.n == 1 ? 2.0 * st.radii[i] : pi * st.radii[i] * st.radii[i];
    out = out + scaled(average_over_ball(f, z, st.radii[i]), st.coeffs[i] * vol);
  }
  return out;
}

// ---------------------------------------------------------------- Rademacher

// r_k(t) = r_0(2^k t mod 1), r_0 = -1 on [0, 1/2), +1 on [1/2, 1)
inline int rademacher(int k, double t) {
  if (k < 0) throw std::invalid_argument("rademacher: k must be >= 0");
  double u = std::ldexp(t, k);
  u -= std::floor(u);
  return u < 0.5 ? -1 : 1;
}

}  // namespace fl
