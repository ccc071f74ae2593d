// Linear and bilinear Fourier symbols.
//
// A bilinear symbol is any callable (Vec xi, Vec eta) -> cplx.  Symbols that can do
// better on a grid also expose on_grid(spec), returning an evaluator (i, j) -> cplx on
// flat frequency indices; apply_bilinear prefers it when present.
#pragma once

#include <concepts>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "fl/grid.hpp"
#include "fl/lp.hpp"

namespace fl {

// ---------------------------------------------------------------- linear

enum class LinearKind { Ds, Js, riesz_Gk, Gk_tilde, partial, lp_phi_k, lp_psi_k, custom };

struct LinearSymbol {
  std::function<cplx(const Vec&)> rule;  // evaluated at nonzero frequencies
  double order_s = 0.0;
  LinearKind kind = LinearKind::custom;
  cplx at_zero = 0.0;
  bool identity = false;  // s = 0 for Ds / Js: applied as an exact copy

  cplx operator()(const Vec& xi) const {
    if (xi[0] == 0.0 && xi[1] == 0.0) return at_zero;
    return rule(xi);
  }
};

// |xi|^s; 0 at the origin for s > 0, identity for s = 0
inline LinearSymbol Ds(double s) {
  if (s < 0.0) throw std::invalid_argument("Ds: negative order is singular at xi = 0");
  LinearSymbol m;
  m.kind = LinearKind::Ds;
  m.order_s = s;
  m.identity = (s == 0.0);
  m.at_zero = (s == 0.0) ? 1.0 : 0.0;
  m.rule = [s](const Vec& xi) { return cplx(std::pow(norm2(xi), s)); };
  return m;
}

// (1 + |xi|^2)^{s/2}
inline LinearSymbol Js(double s) {
  LinearSymbol m;
  m.kind = LinearKind::Js;
  m.order_s = s;
  m.identity = (s == 0.0);
  m.at_zero = 1.0;
  m.rule = [s](const Vec& xi) { return cplx(std::pow(1.0 + dot(xi, xi), 0.5 * s)); };
  return m;
}

// G_k: eta_k / |eta|, set to 0 at eta = 0
inline LinearSymbol riesz_G(int k) {
  LinearSymbol m;
  m.kind = LinearKind::riesz_Gk;
  m.rule = [k](const Vec& xi) { return cplx(xi[k] / norm2(xi)); };
  return m;
}

// eta_k (1+|eta|^2)^{(1-s)/2} ((1+|eta|^2)^{s/2} - 1) / |eta|^2, with limit 0 at eta = 0
inline LinearSymbol riesz_G_tilde(int k, double s) {
  LinearSymbol m;
  m.kind = LinearKind::Gk_tilde;
  m.order_s = s;
  m.rule = [k, s](const Vec& xi) {
    double r2 = dot(xi, xi);
    // expm1/log1p keep the small-|eta| quotient accurate
    double num = std::expm1(0.5 * s * std::log1p(r2));
    return cplx(xi[k] * std::pow(1.0 + r2, 0.5 * (1.0 - s)) * num / r2);
  };
  return m;
}

// d/dx_nu has symbol 2 pi i xi_nu
inline LinearSymbol partial(int nu) {
  LinearSymbol m;
  m.kind = LinearKind::partial;
  m.order_s = 1.0;
  m.rule = [nu](const Vec& xi) { return two_pi_i * xi[nu]; };
  return m;
}

inline LinearSymbol lp_phi_k(const LittlewoodPaleyFamily& fam, int k) {
  LinearSymbol m;
  m.kind = LinearKind::lp_phi_k;
  m.at_zero = 1.0;
  m.rule = [fam, k](const Vec& xi) { return cplx(fam.phi_k(k, norm2(xi))); };
  return m;
}

inline LinearSymbol lp_psi_k(const LittlewoodPaleyFamily& fam, int k) {
  LinearSymbol m;
  m.kind = LinearKind::lp_psi_k;
  m.rule = [fam, k](const Vec& xi) { return cplx(fam.psi_k(k, norm2(xi))); };
  return m;
}

inline LinearSymbol custom_linear(std::function<cplx(const Vec&)> rule, cplx at_zero) {
  LinearSymbol m;
  m.rule = std::move(rule);
  m.at_zero = at_zero;
  return m;
}

// ---------------------------------------------------------------- bilinear

enum class SupportTag { full, eta_small, xi_small, diagonal };

template <class S>
concept BilinearCallable = requires(const S& s, const Vec& a, const Vec& b) {
  { s(a, b) } -> std::convertible_to<cplx>;
};

template <class S>
concept GridAccelerated = requires(const S& s, const GridSpec& g) {
  { s.on_grid(g) };
};

// Evaluator on flat frequency indices, falling back to plain evaluation.
template <class S>
auto grid_evaluator(const S& sym, const GridSpec& spec) {
  if constexpr (GridAccelerated<S>) {
    return sym.on_grid(spec);
  } else {
    return [&sym, spec](std::size_t i, std::size_t j) -> cplx {
      return sym(spec.frequency(i), spec.frequency(j));
    };
  }
}

// Type-erased bilinear symbol, for configs and registries.
struct BilinearSymbol {
  std::function<cplx(const Vec&, const Vec&)> rule;
  SupportTag support = SupportTag::full;
  std::function<std::function<cplx(std::size_t, std::size_t)>(const GridSpec&)> grid;  // optional

  cplx operator()(const Vec& a, const Vec& b) const { return rule(a, b); }
  std::function<cplx(std::size_t, std::size_t)> on_grid(const GridSpec& spec) const {
    if (grid) return grid(spec);
    auto r = rule;
    return [r, spec](std::size_t i, std::size_t j) { return r(spec.frequency(i), spec.frequency(j)); };
  }
};

template <BilinearCallable S>
BilinearSymbol erase(S sym, SupportTag tag = SupportTag::full) {
  BilinearSymbol out;
  auto p = std::make_shared<S>(std::move(sym));
  out.rule = [p](const Vec& a, const Vec& b) { return cplx((*p)(a, b)); };
  out.support = tag;
  if constexpr (GridAccelerated<S>) {
    out.grid = [p](const GridSpec& spec) -> std::function<cplx(std::size_t, std::size_t)> {
      return p->on_grid(spec);
    };
  }
  return out;
}

// a(xi, eta) * b(xi, eta); b is skipped wherever a vanishes, so b may be singular there.
template <class A, class B>
struct Product {
  A a;
  B b;
  cplx operator()(const Vec& x, const Vec& y) const {
    cplx va = a(x, y);
    if (va == 0.0) return 0.0;
    return va * cplx(b(x, y));
  }
  auto on_grid(const GridSpec& spec) const {
    auto self = std::make_shared<const Product>(*this);  // evaluator may outlive *this
    auto ea = grid_evaluator(self->a, spec);
    return [ea, self, spec](std::size_t i, std::size_t j) -> cplx {
      cplx va = ea(i, j);
      if (va == 0.0) return 0.0;
      return va * cplx(self->b(spec.frequency(i), spec.frequency(j)));
    };
  }
};

template <class A, class B>
Product<A, B> product(A a, B b) {
  return {std::move(a), std::move(b)};
}

// sigma(xi, eta) = a(xi) b(eta)
struct Separable {
  LinearSymbol a, b;
  cplx operator()(const Vec& x, const Vec& y) const { return a(x) * b(y); }
};

// Frequency table indexed by (i, j) on an n = 1 grid, stored as an n = 2 grid function.
struct TabulatedSymbol {
  GridFunction table;

  cplx operator()(const Vec& x, const Vec& y) const {
    const GridSpec& t = table.spec;
    auto slot = [&](double v) {
      long k = std::lround(v * t.L);
      return std::size_t(k >= 0 ? k : k + t.N);
    };
    return table[slot(x[0]) * t.N + slot(y[0])];
  }
  auto on_grid(const GridSpec& spec) const {
    if (spec.n != 1 || table.spec.N != spec.N || table.spec.L != spec.L)
      throw std::invalid_argument("tabulated symbol does not match the grid");
    auto tb = std::make_shared<const GridFunction>(table);
    const std::size_t N = std::size_t(spec.N);
    return [tb, N](std::size_t i, std::size_t j) { return (*tb)[i * N + j]; };
  }
};

}  // namespace fl
