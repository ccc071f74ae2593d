// Paraproduct splitting of the product fg, the three Kato-Ponce pieces, the commutator
// pieces and their rewritings, translated-kernel square functions and T_m sums.
#pragma once

#include <memory>
#include <vector>

#include "fl/multipliers.hpp"

namespace fl {

enum class Flavor { homogeneous, inhomogeneous };

inline const char* to_string(Flavor f) { return f == Flavor::homogeneous ? "homogeneous" : "inhomogeneous"; }

// generalized binomial coefficient a(a-1)...(a-j+1)/j!
inline double binom(double a, int j) {
  if (j < 0) throw std::invalid_argument("binom: j must be >= 0");
  double c = 1.0;
  for (int i = 0; i < j; ++i) c *= (a - i) / (i + 1);
  return c;
}

// ---------------------------------------------------------------- paraproduct symbols

// Phi1 = sum_k psi(2^-k xi) phi(2^-(k-shift) eta), Phi2 the mirror image,
// Phi3 = sum_k sum_{|l|<=band} psi(2^-k xi) psi(2^-(k+l) eta).
// With band = shift - 1 the three add up to 1 away from the origin.
struct ParaproductSymbols {
  LittlewoodPaleyFamily fam = build_lp_family(LpKind::telescoping);
  int shift = 5;
  int band = 4;

  ParaproductSymbols() = default;
  ParaproductSymbols(int shift_, int band_) : shift(shift_), band(band_) { validate(); }

  void validate() const {
    if (fam.kind != LpKind::telescoping) throw std::invalid_argument("paraproduct needs the telescoping family");
    if (shift < 2 || band != shift - 1) throw std::invalid_argument("paraproduct: band must equal shift - 1");
  }

  // |eta| <= 2^{-(shift-2)} |xi| on supp Phi1
  double support_ratio() const { return std::ldexp(1.0, -(shift - 2)); }

  double phi1(const Vec& xi, const Vec& eta) const {
    double a = norm2(xi), b = norm2(eta);
    auto [k0, k1] = LittlewoodPaleyFamily::active_range(a);
    double s = 0.0;
    for (int k = k0; k <= k1; ++k) s += fam.psi_k(k, a) * fam.phi_k(k - shift, b);
    return s;
  }
  double phi2(const Vec& xi, const Vec& eta) const { return phi1(eta, xi); }
  double phi3(const Vec& xi, const Vec& eta) const {
    double a = norm2(xi), b = norm2(eta);
    auto [k0, k1] = LittlewoodPaleyFamily::active_range(a);
    auto [l0, l1] = LittlewoodPaleyFamily::active_range(b);
    double s = 0.0;
    for (int k = k0; k <= k1; ++k)
      for (int l = l0; l <= l1; ++l)
        if (std::abs(l - k) <= band) s += fam.psi_k(k, a) * fam.psi_k(l, b);
    return s;
  }

  // Per-grid tables: for every frequency index the few (k, psi_k) pairs that are nonzero,
  // and phi(2^-m |xi|) for every m that can be requested.
  struct Tables {
    struct Entry {
      int k;
      double v;
    };
    std::vector<std::array<Entry, 3>> psi;
    std::vector<int> count;
    int m_min = 0, m_max = -1;
    std::vector<std::vector<double>> phi;  // phi[m - m_min][idx]

    double phi_at(int m, std::size_t idx) const {
      if (m < m_min) return 0.0;  // 2^-m |xi| >= 2 for every grid frequency
      if (m > m_max) return 1.0;
      return phi[std::size_t(m - m_min)][idx];
    }
  };

  std::shared_ptr<const Tables> tables(const GridSpec& spec) const {
    auto t = std::make_shared<Tables>();
    const std::size_t M = spec.size();
    t->psi.resize(M);
    t->count.assign(M, 0);
    int kmin = 1 << 30, kmax = -(1 << 30);
    for (std::size_t i = 0; i < M; ++i) {
      double r = norm2(spec.frequency(i));
      auto [k0, k1] = LittlewoodPaleyFamily::active_range(r);
      for (int k = k0; k <= k1; ++k) {
        double v = fam.psi_k(k, r);
        if (v != 0.0) {
          t->psi[i][std::size_t(t->count[i]++)] = {k, v};
          kmin = std::min(kmin, k);
          kmax = std::max(kmax, k);
        }
      }
    }
    if (kmin > kmax) return t;
    t->m_min = kmin - shift - 1;
    t->m_max = kmax + 1;
    for (int m = t->m_min; m <= t->m_max; ++m) {
      std::vector<double> row(M);
      for (std::size_t i = 0; i < M; ++i) row[i] = fam.phi_k(m, norm2(spec.frequency(i)));
      t->phi.push_back(std::move(row));
    }
    return t;
  }
};

// One of Phi1, Phi2, Phi3 as a grid-accelerated bilinear symbol.  With origin_to_three the
// pair (0, 0) is assigned to Phi3, so the three pieces partition unity everywhere.
struct PhiSymbol {
  ParaproductSymbols pp;
  int which = 1;
  bool origin_to_three = false;

  cplx operator()(const Vec& xi, const Vec& eta) const {
    if (origin_to_three && which == 3 && norm2(xi) == 0.0 && norm2(eta) == 0.0) return 1.0;
    switch (which) {
      case 1: return pp.phi1(xi, eta);
      case 2: return pp.phi2(xi, eta);
      default: return pp.phi3(xi, eta);
    }
  }

  auto on_grid(const GridSpec& spec) const {
    auto t = pp.tables(spec);
    const int shift = pp.shift, band = pp.band, w = which;
    const bool o3 = origin_to_three;
    return [t, shift, band, w, o3](std::size_t i, std::size_t j) -> cplx {
      double s = 0.0;
      if (w == 1) {
        for (int a = 0; a < t->count[i]; ++a) s += t->psi[i][std::size_t(a)].v * t->phi_at(t->psi[i][std::size_t(a)].k - shift, j);
      } else if (w == 2) {
        for (int a = 0; a < t->count[j]; ++a) s += t->psi[j][std::size_t(a)].v * t->phi_at(t->psi[j][std::size_t(a)].k - shift, i);
      } else {
        if (o3 && i == 0 && j == 0) return 1.0;
        for (int a = 0; a < t->count[i]; ++a)
          for (int b = 0; b < t->count[j]; ++b)
            if (std::abs(t->psi[i][std::size_t(a)].k - t->psi[j][std::size_t(b)].k) <= band)
              s += t->psi[i][std::size_t(a)].v * t->psi[j][std::size_t(b)].v;
      }
      return s;
    };
  }
};

inline PhiSymbol Phi(const ParaproductSymbols& pp, int which, bool origin_to_three = false) {
  return PhiSymbol{pp, which, origin_to_three};
}

// ---------------------------------------------------------------- scalar symbol factors

namespace detail {

inline double weight_D(double r, double s) { return std::pow(r, s); }
inline double weight_J(double r, double s) { return std::pow(1.0 + r * r, 0.5 * s); }

// |xi+eta|^s / |xi|^s (denom 0) or / |eta|^s (denom 1); J-flavor uses (1+|.|^2)^{s/2}.
struct Quotient {
  double s;
  Flavor flavor;
  int denom;
  cplx operator()(const Vec& xi, const Vec& eta) const {
    double num_r = norm2(xi + eta), den_r = norm2(denom == 0 ? xi : eta);
    if (flavor == Flavor::inhomogeneous) return weight_J(num_r, s) / weight_J(den_r, s);
    if (s == 0.0) return 1.0;
    if (den_r == 0.0) return num_r == 0.0 ? 1.0 : 0.0;  // only reached at the origin pair
    return std::pow(num_r / den_r, s);
  }
};

// |xi+eta|^s - |eta|^s, or the J analogue
struct Difference {
  double s;
  Flavor flavor;
  cplx operator()(const Vec& xi, const Vec& eta) const {
    double a = norm2(xi + eta), b = norm2(eta);
    if (flavor == Flavor::inhomogeneous) return weight_J(a, s) - weight_J(b, s);
    if (s == 0.0) return 0.0;
    return std::pow(a, s) - std::pow(b, s);
  }
};

// ((1+|xi+eta|^2)^{s/2} - 1) / (1+|xi|^2)^{s/2}
struct InhomQ1Factor {
  double s;
  cplx operator()(const Vec& xi, const Vec& eta) const {
    double a = norm2(xi + eta), b = norm2(xi);
    return std::expm1(0.5 * s * std::log1p(a * a)) / weight_J(b, s);
  }
};

// xi_j eta_k |xi|^{-2} / (2 pi i)
struct RieszPairFactor {
  int j, k;
  cplx operator()(const Vec& xi, const Vec& eta) const { return xi[j] * eta[k] / dot(xi, xi) / two_pi_i; }
};

// (|xi|^2 + 2 xi.eta)^{j-1} (xi_nu + 2 eta_nu) / |eta|^{2j-1}, or / (1+|eta|^2)^{j-1/2}
struct SigmaFactor {
  int j, nu;
  Flavor flavor;
  cplx operator()(const Vec& xi, const Vec& eta) const {
    double g = dot(xi, xi) + 2.0 * dot(xi, eta);
    double e2 = dot(eta, eta);
    double den = flavor == Flavor::homogeneous ? std::pow(e2, j - 0.5) : std::pow(1.0 + e2, j - 0.5);
    return std::pow(g, j - 1) * (xi[nu] + 2.0 * eta[nu]) / den;
  }
};

inline LinearSymbol weight_op(Flavor fl, double s) { return fl == Flavor::homogeneous ? Ds(s) : Js(s); }

}  // namespace detail

// ---------------------------------------------------------------- Kato-Ponce pieces

struct Pieces {
  GridFunction p1, p2, p3;
  GridFunction sum() const { return p1 + p2 + p3; }
};

// P1 = T1(D^s f, g), P2 = T2(f, D^s g), P3 = T3(f, D^s g); J^s for the inhomogeneous flavor.
inline Pieces kp_pieces(const GridFunction& f, const GridFunction& g, double s, Flavor flavor,
                        const ParaproductSymbols& pp = {}) {
  if (s < 0.0) throw std::invalid_argument("kp_pieces: s must be >= 0");
  auto W = detail::weight_op(flavor, s);
  GridFunction Wf = apply_linear(f, W), Wg = apply_linear(g, W);
  Pieces out;
  out.p1 = apply_bilinear(Wf, g, product(Phi(pp, 1), detail::Quotient{s, flavor, 0}));
  out.p2 = apply_bilinear(f, Wg, product(Phi(pp, 2), detail::Quotient{s, flavor, 1}));
  out.p3 = apply_bilinear(f, Wg, product(Phi(pp, 3, true), detail::Quotient{s, flavor, 1}));
  return out;
}

// D^s(fg) or J^s(fg), the reference side of the decomposition
inline GridFunction leibniz_reference(const GridFunction& f, const GridFunction& g, double s, Flavor flavor) {
  return apply_linear(pointwise_product(f, g), detail::weight_op(flavor, s));
}

// ---------------------------------------------------------------- commutators

inline GridFunction commutator(const GridFunction& f, const GridFunction& g, double s, Flavor flavor) {
  auto W = detail::weight_op(flavor, s);
  return apply_linear(pointwise_product(f, g), W) - pointwise_product(f, apply_linear(g, W));
}

inline Pieces commutator_pieces(const GridFunction& f, const GridFunction& g, double s, Flavor flavor,
                                const ParaproductSymbols& pp = {}) {
  if (s < 0.0) throw std::invalid_argument("commutator_pieces: s must be >= 0");
  Pieces out;
  detail::Difference d{s, flavor};
  out.p1 = apply_bilinear(f, g, product(Phi(pp, 1), d));
  out.p2 = apply_bilinear(f, g, product(Phi(pp, 2), d));
  out.p3 = apply_bilinear(f, g, product(Phi(pp, 3, true), d));
  return out;
}

// Q1 rewritten through the Riesz-type multipliers:
//   Q1^1(D^s f, g) - sum_{j,k} Q1^{2,j,k}(d_j f, G_k D^{s-1} g)
// with the J^s, G~_k analogues for the inhomogeneous flavor.
inline GridFunction q1_riesz_form(const GridFunction& f, const GridFunction& g, double s, Flavor flavor,
                                  const ParaproductSymbols& pp = {}) {
  if (s < 1.0) throw std::invalid_argument("q1_riesz_form: requires s >= 1");
  const int n = f.spec.n;
  GridFunction first;
  if (flavor == Flavor::homogeneous)
    first = apply_bilinear(apply_linear(f, Ds(s)), g, product(Phi(pp, 1), detail::Quotient{s, flavor, 0}));
  else
    first = apply_bilinear(apply_linear(f, Js(s)), g, product(Phi(pp, 1), detail::InhomQ1Factor{s}));
  GridFunction out = first;
  LinearSymbol lower = flavor == Flavor::homogeneous ? Ds(s - 1.0) : Js(s - 1.0);
  for (int j = 0; j < n; ++j) {
    GridFunction dj = apply_linear(f, partial(j));
    for (int k = 0; k < n; ++k) {
      LinearSymbol G = flavor == Flavor::homogeneous ? riesz_G(k) : riesz_G_tilde(k, s);
      GridFunction gk = apply_linear(g, {G, lower});
      out = out - apply_bilinear(dj, gk, product(Phi(pp, 1), detail::RieszPairFactor{j, k}));
    }
  }
  return out;
}

struct SeriesSpec {
  double s = 1.0;
  int J_max = 8;
  std::vector<double> coeffs;  // c_{j,s} = binom(s/2, j), j = 1..J_max (index j-1)
  double tail_bound = 0.0;     // sum_{j > J_max} |c_j| ((17/64)^j + (17/32)^j)
};

inline double series_tail(double s, int J) {
  double tail = 0.0;
  for (int j = J + 1; j < J + 4000; ++j) {
    double c = std::abs(binom(0.5 * s, j));
    double term = c * (std::pow(17.0 / 64.0, j) + std::pow(17.0 / 32.0, j));
    tail += term;
    if (term < 1e-18 * std::max(tail, 1e-300) || c == 0.0) {
      if (c == 0.0) {
        // c_j vanishes for all larger j only when s/2 is a nonnegative integer
        double half = 0.5 * s;
        if (half == std::floor(half) && half >= 0.0) break;
        continue;
      }
      break;
    }
  }
  return tail;
}

inline SeriesSpec make_series_spec(double s, int J_max) {
  if (J_max < 1) throw std::invalid_argument("series truncation must be >= 1");
  SeriesSpec sp;
  sp.s = s;
  sp.J_max = J_max;
  for (int j = 1; j <= J_max; ++j) sp.coeffs.push_back(binom(0.5 * s, j));
  sp.tail_bound = series_tail(s, J_max);
  return sp;
}

// Individual terms (1/(2 pi i)) c_j sum_nu T_{sigma_{j,nu}}(d_nu f, D^{s-1} g), j = 1..J_max.
inline std::vector<GridFunction> q2_series_terms(const GridFunction& f, const GridFunction& g, const SeriesSpec& sp,
                                                 Flavor flavor = Flavor::homogeneous,
                                                 const ParaproductSymbols& pp = {}) {
  if (sp.s < 1.0) throw std::invalid_argument("q2_series: requires s >= 1");
  const int n = f.spec.n;
  GridFunction low = apply_linear(g, flavor == Flavor::homogeneous ? Ds(sp.s - 1.0) : Js(sp.s - 1.0));
  std::vector<GridFunction> dnu;
  for (int nu = 0; nu < n; ++nu) dnu.push_back(apply_linear(f, partial(nu)));
  std::vector<GridFunction> terms;
  for (int j = 1; j <= sp.J_max; ++j) {
    const double c = sp.coeffs[std::size_t(j - 1)];
    GridFunction term(f.spec);
    if (c != 0.0) {
      for (int nu = 0; nu < n; ++nu)
        term = term + apply_bilinear(dnu[std::size_t(nu)], low, product(Phi(pp, 2), detail::SigmaFactor{j, nu, flavor}));
      term = scaled(term, c / two_pi_i);
    }
    terms.push_back(std::move(term));
  }
  return terms;
}

inline GridFunction q2_series(const GridFunction& f, const GridFunction& g, double s, const SeriesSpec& sp,
                              Flavor flavor = Flavor::homogeneous, const ParaproductSymbols& pp = {}) {
  if (sp.s != s) throw std::invalid_argument("q2_series: series spec built for a different s");
  GridFunction out(f.spec);
  for (auto& t : q2_series_terms(f, g, sp, flavor, pp)) out = out + t;
  return out;
}

// L^{-2n} sum Phi2 W(eta) |fhat| |ghat|: multiplying by the tail bound gives a rigorous
// pointwise bound on |Q2 - q2_series|.
inline double q2_tail_scale(const GridFunction& f, const GridFunction& g, double s, Flavor flavor,
                            const ParaproductSymbols& pp = {}) {
  const GridSpec& spec = f.spec;
  GridFunction fh = fourier(f), gh = fourier(g);
  auto ev = grid_evaluator(Phi(pp, 2), spec);
  double acc = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    if (gh[j] == 0.0) continue;
    double r = norm2(spec.frequency(j));
    double w = flavor == Flavor::homogeneous ? detail::weight_D(r, s) : detail::weight_J(r, s);
    double inner = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i)
      if (fh[i] != 0.0) inner += ev(i, j).real() * std::abs(fh[i]);
    acc += w * std::abs(gh[j]) * inner;
  }
  return acc / (spec.volume() * spec.volume());
}

// ---------------------------------------------------------------- square functions and T_m

// S_m f = (sum_k |Psi_{k,m} * f|^2)^{1/2} over the family's k range
inline GridFunction square_function(const GridFunction& f, const TranslatedKernelFamily& fam, const IVec& m) {
  GridFunction out(f.spec);
  std::vector<double> acc(f.size(), 0.0);
  for (int k = fam.k_min; k <= fam.k_max; ++k) {
    GridFunction c = translated_convolution(f, fam, k, m);
    for (std::size_t i = 0; i < f.size(); ++i) acc[i] += std::norm(c[i]);
  }
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::sqrt(acc[i]);
  return out;
}

inline GridFunction square_function(const GridFunction& f, const TranslatedKernelFamily& fam, int m) {
  return square_function(f, fam, IVec{m, 0});
}

// T_m(f, g) = sum_k (Psi1_{k,m} * f)(Psi2_{k,m} * g)
inline GridFunction tm_operator(const GridFunction& f, const GridFunction& g, const TranslatedKernelFamily& fam1,
                                const TranslatedKernelFamily& fam2, const IVec& m) {
  require_same_spec(f, g, "tm_operator");
  GridFunction out(f.spec);
  const int k0 = std::max(fam1.k_min, fam2.k_min), k1 = std::min(fam1.k_max, fam2.k_max);
  for (int k = k0; k <= k1; ++k)
    out = out + pointwise_product(translated_convolution(f, fam1, k, m), translated_convolution(g, fam2, k, m));
  return out;
}

inline GridFunction tm_operator(const GridFunction& f, const GridFunction& g, const TranslatedKernelFamily& fam1,
                                const TranslatedKernelFamily& fam2, int m) {
  return tm_operator(f, g, fam1, fam2, IVec{m, 0});
}

// synthetic coefficients c_{s,m} = (1+|m|)^{-(n+s)}
inline double tm_coefficient(int n, double s, const IVec& m) {
  double r = std::sqrt(double(m[0]) * m[0] + double(m[1]) * m[1]);
  return std::pow(1.0 + r, -(n + s));
}

inline std::vector<IVec> lattice_range(int n, int M) {
  std::vector<IVec> ms;
  for (int a = -M; a <= M; ++a)
    for (int b = (n == 2 ? -M : 0); b <= (n == 2 ? M : 0); ++b) ms.push_back({a, b});
  return ms;
}

inline GridFunction tm_series(const GridFunction& f, const GridFunction& g, int n, double s, int M_max,
                              const TranslatedKernelFamily& fam1, const TranslatedKernelFamily& fam2) {
  GridFunction out(f.spec);
  for (const IVec& m : lattice_range(n, M_max))
    out = out + scaled(tm_operator(f, g, fam1, fam2, m), tm_coefficient(n, s, m));
  return out;
}

}  // namespace fl
