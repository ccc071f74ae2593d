// Littlewood-Paley pieces of a random function: partial sums of psi_k reproduce phi_M,
// and summing the band pieces of f over every resolvable k gives f back.
#include <cstdio>

#include "fl/fl.hpp"

using namespace fl;

int main() {
  auto fam = build_lp_family();
  std::printf("%8s %4s %22s %22s\n", "|xi|", "M", "sum_{k<=M} psi_k", "phi_hat(2^-M xi)");
  for (double r : {0.3, 1.0, 1.7, 6.0})
    for (int M : {-1, 0, 2}) {
      double s = 0.0;
      for (int k = -60; k <= M; ++k) s += fam.psi_k(k, r);
      std::printf("%8.3g %4d %22.17g %22.17g\n", r, M, s, fam.phi_k(M, r));
    }

  GridSpec spec(1, 1024, 32.0);
  GridFunction f = random_bandlimited(spec, 5, 0.0, true);
  GridFunction sum = apply_linear(f, lp_phi_k(fam, -6));
  double kmax = std::log2(spec.N / spec.L) + 2;
  for (int k = -5; k <= int(kmax); ++k) sum = sum + apply_linear(f, lp_psi_k(fam, k));
  std::printf("\nphi_{-6} f + sum_{k=-5}^{%d} psi_k f vs f: max error %.3g\n", int(kmax), max_abs_diff(sum, f));
  return 0;
}
