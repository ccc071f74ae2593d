// Littlewood-Paley profiles built from the C-infinity bump exp(-1/(1-t^2)).
//   phi_hat(t) = 1 on [0,1], 0 on [2,inf), 1 - C(t-1) in between,
//   C(u) = int_{-1}^{2u-1} b / int_{-1}^{1} b.
#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <optional>
#include <vector>

#include "fl/grid.hpp"

namespace fl {

namespace detail {

class Transition {
 public:
  static const Transition& instance() {
    static const Transition t;
    return t;
  }

  // C(u) for u in [0, 1]
  double operator()(double u) const {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double t = 2.0 * u - 1.0;  // in (-1, 1)
    double pos = (t + 1.0) / step_;
    std::size_t j = std::min<std::size_t>(std::size_t(pos), cells - 1);
    double a = -1.0 + j * step_;
    double partial = Gauss::integrate(bump, a, t);
    return (cumulative_[j] + partial) / total_;
  }

  static double bump(double t) {
    double d = 1.0 - t * t;
    return d > 0.0 ? std::exp(-1.0 / d) : 0.0;
  }

 private:
  using Gauss = boost::math::quadrature::gauss<double, 8>;
  static constexpr std::size_t cells = 2048;

  Transition() : step_(2.0 / cells), cumulative_(cells + 1, 0.0) {
    for (std::size_t j = 0; j < cells; ++j) {
      double a = -1.0 + j * step_;
      cumulative_[j + 1] = cumulative_[j] + Gauss::integrate(bump, a, a + step_);
    }
    total_ = cumulative_[cells];
  }

  double step_;
  std::vector<double> cumulative_;
  double total_ = 1.0;
};

}  // namespace detail

// Radial low-pass profile, equal to 1 on |xi| <= 1 and 0 on |xi| >= 2.
inline double phi_hat(double t) {
  t = std::abs(t);
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  return 1.0 - detail::Transition::instance()(t - 1.0);
}

// psi(t) = phi_hat(t) - phi_hat(2t), supported in (1/2, 2)
inline double psi_profile(double t) {
  t = std::abs(t);
  if (t <= 0.5 || t >= 2.0) return 0.0;
  return phi_hat(t) - phi_hat(2.0 * t);
}

enum class LpKind { telescoping, squared_normalized };

struct LittlewoodPaleyFamily {
  LpKind kind = LpKind::telescoping;
  std::optional<double> c_phi;  // sum_k |psi(2^-k xi)|^2 for the squared-normalized variant

  double phi(double t) const { return phi_hat(t); }
  // annular profile whose dyadic dilates form the decomposition
  double psi(double t) const {
    double v = psi_profile(t);
    return kind == LpKind::telescoping ? v : std::sqrt(std::max(v, 0.0));
  }
  double phi_k(int k, double t) const { return phi(std::ldexp(t, -k)); }
  double psi_k(int k, double t) const { return psi(std::ldexp(t, -k)); }

  // smallest and largest k with psi(2^-k t) possibly nonzero
  static std::array<int, 2> active_range(double t) {
    t = std::abs(t);
    if (t == 0.0) return {1, 0};
    int e = int(std::floor(std::log2(t)));
    return {e - 1, e + 1};  // one extra slot absorbs log2 rounding at powers of two
  }
};

inline LittlewoodPaleyFamily build_lp_family(LpKind kind = LpKind::telescoping) {
  LittlewoodPaleyFamily fam;
  fam.kind = kind;
  if (kind == LpKind::squared_normalized) fam.c_phi = 1.0;
  return fam;
}

}  // namespace fl
