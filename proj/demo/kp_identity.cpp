// The three Kato-Ponce pieces of D^s(fg) and J^s(fg) for a random pair, and how far their sum
// is from the direct derivative of the product.
#include <cstdio>

#include "fl/fl.hpp"

using namespace fl;

int main() {
  GridSpec spec(1, 1024, 32.0);
  GridFunction f = random_bandlimited(spec, 11, 0.0, true), g = random_bandlimited(spec, 12, 0.0, true);
  std::printf("%5s %-13s %11s %11s %11s %11s %10s\n", "s", "flavor", "|P1|_2", "|P2|_2", "|P3|_2", "|D(fg)|_2", "rel err");
  for (double s : {0.5, 1.0, 2.0, 2.7})
    for (Flavor fl : {Flavor::homogeneous, Flavor::inhomogeneous}) {
      auto pc = kp_pieces(f, g, s, fl);
      auto ref = leibniz_reference(f, g, s, fl);
      std::printf("%5.2g %-13s %11.5g %11.5g %11.5g %11.5g %10.3g\n", s, to_string(fl), l2_norm(pc.p1), l2_norm(pc.p2),
                  l2_norm(pc.p3), l2_norm(ref), rel_err(pc.sum(), ref));
    }

  auto cp = commutator_pieces(f, g, 1.5, Flavor::homogeneous);
  std::printf("\ncommutator D^1.5(fg) - f D^1.5 g: pieces sum rel err %.3g, Riesz form of Q1 rel err %.3g\n",
              rel_err(cp.sum(), commutator(f, g, 1.5, Flavor::homogeneous)),
              rel_err(q1_riesz_form(f, g, 1.5, Flavor::homogeneous), cp.p1));
  return 0;
}
