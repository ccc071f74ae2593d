// Weighted Kato-Ponce ratios for power weights: A_p characteristics of the weights, then the
// max ratio over a 40-pair family at N and 2N.
#include <cstdio>

#include "fl/fl.hpp"

using namespace fl;
using namespace fl::harness;

int main() {
  std::printf("%6s %6s %6s %6s %10s %10s %12s %12s %8s\n", "p", "q", "alpha", "beta", "[v]_Ap", "[w]_Aq", "max ratio N",
              "max ratio 2N", "change");
  for (auto [p, q, a, b] : {std::tuple{2.0, 2.0, 0.5, -0.3}, {4.0, 4.0, 1.5, 0.5}, {1.5, 3.0, 0.25, 1.0}}) {
    ExperimentConfig c = default_config("kp-d");
    c.family_size = 40;
    c.params["p"] = p;
    c.params["q"] = q;
    c.params["alpha"] = a;
    c.params["beta"] = b;
    InequalityReport r = run_experiment(c);
    GridSpec spec = c.grid;
    double av = ap_characteristic(power_weight(spec, a), p).characteristic;
    double aw = ap_characteristic(power_weight(spec, b), q).characteristic;
    std::printf("%6g %6g %6g %6g %10.4g %10.4g %12.5g %12.5g %8.3g\n", p, q, a, b, av, aw, r.max_ratio,
                r.refined_max_ratio.value_or(0.0), r.refinement_change.value_or(0.0));
  }
  return 0;
}
