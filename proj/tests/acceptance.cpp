// Acceptance run: one PASS/FAIL line per criterion item with its pinned tolerance.
// Exit status is 0 when every item passes or the only failures are documented as unattainable.
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fl/fl.hpp"

using namespace fl;
using namespace fl::harness;

namespace {

struct Item {
  std::string id, what;
  bool pass = false;
  bool unattainable = false;  // analysed failure, recorded in the decisions ledger
};

std::vector<Item> items;

void record(const std::string& id, bool pass, const char* fmt, ...) __attribute__((format(printf, 3, 4)));

void record(const std::string& id, bool pass, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  items.push_back({id, buf, pass, false});
  std::printf("%s  %-6s %s\n", pass ? "PASS" : "FAIL", id.c_str(), buf);
  std::fflush(stdout);
}

void mark_unattainable() {
  items.back().unattainable = true;
  std::printf("      %-6s (documented as unattainable on this discretisation; see README)\n", items.back().id.c_str());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GridFunction random_complex(const GridSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridFunction f(spec);
  for (auto& v : f.values) v = {u(rng), u(rng)};
  return f;
}

struct Pair {
  GridFunction f, g;
};

Pair random_pair(const GridSpec& spec, std::uint64_t seed, bool with_mean) {
  return {random_bandlimited(spec, 2 * seed + 1, 0.0, with_mean), random_bandlimited(spec, 2 * seed + 2, 0.0, with_mean)};
}

void set(ExperimentConfig& c, const std::string& key, double v) { apply_setting(c, key, format_double(v)); }

// ---------------------------------------------------------------- 1. exact identities

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const GridSpec spec(1, 1024, 32.0);

  {
    double rt = 0.0, planch = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      GridFunction f = random_complex(spec, seed);
      GridFunction fh = fourier(f);
      rt = std::max(rt, rel_err(inverse(fh), f));
      double lhs = 0.0, rhs = 0.0;
      for (auto v : f.values) lhs += std::norm(v);
      for (auto v : fh.values) rhs += std::norm(v);
      planch = std::max(planch, std::abs(lhs * spec.cell() / (rhs / spec.volume()) - 1.0));
    }
    record("1.1a", rt <= 1e-12, "FFT round trip: max rel err %.3g <= 1e-12", rt);
    record("1.1b", planch <= 1e-10, "Plancherel: max rel defect %.3g <= 1e-10", planch);
    GridFunction gh = fourier(make_test_function(spec, TestKind::gaussian));
    double err = 0.0;
    for (std::size_t i = 0; i < gh.size(); ++i) {
      double xi = spec.frequency(i)[0];
      err = std::max(err, std::abs(gh[i] - std::exp(-pi * xi * xi)));
    }
    record("1.1c", err <= 1e-12, "Gaussian self-transform: max err %.3g <= 1e-12", err);
  }

  {
    auto fam = build_lp_family();
    double worst = 0.0;
    for (int i = 1; i < spec.N; ++i) {
      double r = std::abs(spec.freq(i));
      for (int M = -6; M <= 10; ++M) {
        double s = 0.0;
        for (int k = -60; k <= M; ++k) s += fam.psi_k(k, r);
        worst = std::max(worst, std::abs(s - fam.phi_k(M, r)));
      }
    }
    record("1.2a", worst <= 1e-12, "telescoping sum_{k<=M} psi_k = phi_M, M in [-6,10]: max err %.3g <= 1e-12", worst);

    ParaproductSymbols pp;
    auto e1 = grid_evaluator(Phi(pp, 1), spec), e2 = grid_evaluator(Phi(pp, 2), spec), e3 = grid_evaluator(Phi(pp, 3), spec);
    double part = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i)
      for (std::size_t j = 0; j < spec.size(); ++j)
        if (i || j) part = std::max(part, std::abs(e1(i, j) + e2(i, j) + e3(i, j) - 1.0));
    record("1.2b", part <= 1e-10, "Phi1+Phi2+Phi3 = 1 on all %zu^2 frequency pairs: max err %.3g <= 1e-10", spec.size(), part);
  }

  {
    double worst = 0.0;
    for (double s : {0.5, 1.0, 2.0, 2.7})
      for (Flavor fl : {Flavor::homogeneous, Flavor::inhomogeneous})
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
          auto [f, g] = random_pair(spec, seed, fl == Flavor::inhomogeneous);
          worst = std::max(worst, rel_err(kp_pieces(f, g, s, fl).sum(), leibniz_reference(f, g, s, fl)));
        }
    record("1.3", worst <= 1e-8, "kp_pieces sum = D^s(fg), J^s(fg); s in {0.5,1,2,2.7}, 10 pairs: max rel err %.3g <= 1e-8", worst);
  }

  {
    double comm = 0.0, riesz = 0.0;
    for (double s : {1.0, 1.5, 2.0, 2.7})
      for (Flavor fl : {Flavor::homogeneous, Flavor::inhomogeneous})
        for (std::uint64_t seed = 20; seed <= 22; ++seed) {
          auto [f, g] = random_pair(spec, seed, fl == Flavor::inhomogeneous);
          auto pc = commutator_pieces(f, g, s, fl);
          comm = std::max(comm, rel_err(pc.sum(), commutator(f, g, s, fl)));
          riesz = std::max(riesz, rel_err(q1_riesz_form(f, g, s, fl), pc.p1));
        }
    record("1.4a", comm <= 1e-8, "commutator_pieces sum = commutator: max rel err %.3g <= 1e-8", comm);
    record("1.4b", riesz <= 1e-8, "q1_riesz_form = Q1 direct: max rel err %.3g <= 1e-8", riesz);

    double even = 0.0;
    for (Flavor fl : {Flavor::homogeneous, Flavor::inhomogeneous}) {
      auto [f, g] = random_pair(spec, 30, true);
      even = std::max(even, rel_err(q2_series(f, g, 2.0, make_series_spec(2.0, 3), fl), commutator_pieces(f, g, 2.0, fl).p2));
    }
    record("1.4c", even <= 1e-10, "q2_series at s=2 equals Q2: rel err %.3g <= 1e-10", even);

    const double s = 1.3;
    double over = 0.0, ratio = 0.0;
    for (Flavor fl : {Flavor::homogeneous, Flavor::inhomogeneous}) {
      auto [f, g] = random_pair(spec, 31, fl == Flavor::inhomogeneous);
      auto direct = commutator_pieces(f, g, s, fl).p2;
      const double scale = q2_tail_scale(f, g, s, fl);
      auto terms = q2_series_terms(f, g, make_series_spec(s, 10), fl);
      GridFunction partial_sum(spec);
      double prev = -1.0;
      for (int J = 1; J <= 10; ++J) {
        partial_sum = partial_sum + terms[std::size_t(J - 1)];
        double err = max_abs_diff(partial_sum, direct);
        double bound = make_series_spec(s, J).tail_bound * scale;
        over = std::max(over, err / (bound * (1.0 + 1e-9) + 1e-13));
        if (prev > 1e-12 * max_abs(direct)) ratio = std::max(ratio, err / prev);
        prev = err;
      }
    }
    record("1.4d", over <= 1.0, "q2_series at s=1.3, J=1..10: max error / tail bound %.3g <= 1", over);
    record("1.4e", ratio <= 0.35, "q2_series at s=1.3: max error ratio per added term %.3g <= 0.35", ratio);
  }

  {
    double worst = 0.0;
    for (std::uint64_t seed = 40; seed <= 44; ++seed) {
      auto [f, g] = random_pair(spec, seed, true);
      auto grad = pointwise_product(apply_linear(f, partial(0)), apply_linear(g, partial(0)));
      auto rhs = pointwise_product(apply_linear(f, Ds(2.0)), g) + pointwise_product(f, apply_linear(g, Ds(2.0))) -
                 scaled(grad, 1.0 / (2.0 * pi * pi));
      worst = std::max(worst, rel_err(apply_linear(pointwise_product(f, g), Ds(2.0)), rhs));
    }
    record("1.5", worst <= 1e-9, "D^2(fg) = (D^2 f)g + f(D^2 g) - grad f.grad g/(2 pi^2): max rel err %.3g <= 1e-9", worst);
  }

  const double t = seconds_since(t0);
  record("1.6", t <= 300.0, "exact-identity suite runtime %.1f s <= 300 s", t);
}

// ---------------------------------------------------------------- 2. function spaces

double ap_of(int N, double a, double p) { return ap_characteristic(power_weight(GridSpec(1, N, 16.0), a), p).characteristic; }

// every periodic interval of the grid
double brute_ap(const Weight& w, double p) {
  const int N = w.spec().N;
  double best = 0.0;
  for (int s = 0; s < N; ++s)
    for (int len = 1; len <= N; ++len) {
      double a = 0.0, b = 0.0;
      for (int i = 0; i < len; ++i) {
        double v = w[std::size_t((s + i) % N)];
        a += v;
        b += std::pow(v, -1.0 / (p - 1.0));
      }
      best = std::max(best, (a / len) * std::pow(b / len, p - 1.0));
    }
  return best;
}

void criterion2() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  {
    const GridSpec spec(1, 1024, 32.0);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      auto f = random_bandlimited(spec, rng(), 0.0, true);
      for (double p : {1.2, 2.0, 3.0, 4.5}) {
        double ref = weighted_lp_norm(f, p);
        worst = std::max(worst, std::abs(variable_norm(f, constant_exponent(spec, p)) - ref) / ref);
      }
    }
    record("2.1a", worst <= 1e-9, "variable norm with constant exponent = L^p norm: max rel err %.3g <= 1e-9", worst);
  }
  {
    const GridSpec spec(1, 512, 16.0);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      auto w = power_weight(spec, k % 2 == 0 ? 0.5 : -0.4);
      double p = 1.0 + (k % 4) * 0.5;
      auto f = random_bandlimited(spec, rng(), 0.0, true);
      double ref = weighted_lp_norm(f, p, w.samples);
      worst = std::max(worst, std::abs(lorentz_norm(f, p, p, w.samples) - ref) / ref);
    }
    record("2.1b", worst <= 1e-6, "L^{p,p}(w) = L^p(w), power weights: max rel err %.3g <= 1e-6", worst);
  }
  {
    double worst = 0.0;
    for (auto spec : {GridSpec(1, 256, 16.0), GridSpec(2, 32, 8.0)}) {
      auto f = random_bandlimited(spec, rng(), 0.0, true);
      for (double p : {1.0, 2.0, 3.5}) {
        double ref = weighted_lp_norm(f, p);
        worst = std::max(worst, std::abs(morrey_norm(f, p, spec.n).value - ref) / ref);
      }
    }
    record("2.1c", worst <= 1e-10, "Morrey norm with kappa = n equals L^p: max rel err %.3g <= 1e-10", worst);
  }
  {
    const GridSpec spec(1, 256, 16.0);
    int agree = 0, cases = 0;
    while (cases < 100) {
      auto p = two_value_exponent(spec, 1.1 + 3.0 * unif(rng), 1.1 + 3.0 * unif(rng), 8.0 * (unif(rng) - 0.5));
      auto f = random_bandlimited(spec, rng(), 0.0, true);
      f = scaled(f, 0.5 + unif(rng) / variable_norm(f, p));
      double nrm = variable_norm(f, p), rho = variable_modular(f, p);
      if (std::abs(nrm - 1.0) < 1e-9) continue;  // undecidable at the norm tolerance
      ++cases;
      agree += (nrm <= 1.0) == (rho <= 1.0) ? 1 : 0;
    }
    record("2.2a", agree == cases, "norm <= 1 iff modular <= 1: %d of %d random cases agree", agree, cases);
  }
  {
    const GridSpec spec(1, 512, 16.0);
    double worst = 0.0;
    for (auto [p, q] : {std::pair{2.0, 2.0}, {3.0, 1.5}, {4.0, 4.0}, {1.2, 6.0}}) {
      auto P = constant_exponent(spec, p), Q = constant_exponent(spec, q);
      auto R = harmonic_sum(P, Q);
      for (int k = 0; k < 10; ++k)
        worst = std::max(worst, holder_defect(random_bandlimited(spec, rng(), 0.0, true),
                                              random_bandlimited(spec, rng(), 0.0, true), P, Q, R));
    }
    record("2.2b", worst <= 1.0 + 1e-9, "Hoelder defect with constant exponents: max %.15g <= 1 + 1e-9", worst);
  }
  {
    double dev = 0.0;
    for (auto spec : {GridSpec(1, 128, 8.0), GridSpec(2, 16, 4.0)})
      for (double p : {1.0, 1.5, 2.0, 3.0}) dev = std::max(dev, std::abs(ap_characteristic(constant_weight(spec), p).characteristic - 1.0));
    record("2.3a", dev == 0.0, "[1]_{A_p} = 1 for p in {1,1.5,2,3}, n = 1,2: max deviation %.3g", dev);

    const GridSpec spec(1, 128, 8.0);
    auto w = two_value_weight(spec, 4.0);
    double fast = ap_characteristic(w, 2.0).characteristic, brute = brute_ap(w, 2.0);
    const double closed = (1.0 + 4.0) * (1.0 + 0.25) / 4.0;  // equal halves: avg w * avg 1/w
    record("2.3b", std::abs(fast - closed) <= 1e-10 && std::abs(brute - closed) <= 1e-10,
           "two-value weight t=4, p=2: closed form %.12g, scan %.12g, brute force %.12g (tol 1e-10)", closed, fast, brute);

    // admissible power weights: -1 < a < p - 1 for p = 2
    double in = std::abs(ap_of(1024, 0.5, 2.0) / ap_of(512, 0.5, 2.0) - 1.0);
    double in_neg = std::abs(ap_of(1024, -0.5, 2.0) / ap_of(512, -0.5, 2.0) - 1.0);
    record("2.3c", std::max(in, in_neg) <= 0.02, "A_2 of |x|^a stable inside the range (a = 0.5, -0.5): change %.3g, %.3g <= 0.02",
           in, in_neg);
    double g15a = ap_of(512, 1.5, 2.0) / ap_of(256, 1.5, 2.0), g15b = ap_of(1024, 1.5, 2.0) / ap_of(512, 1.5, 2.0);
    double g2 = ap_of(1024, 2.0, 2.0) / ap_of(512, 2.0, 2.0), g3 = ap_of(1024, 3.0, 2.0) / ap_of(512, 3.0, 2.0);
    record("2.3d", g15a > 1.3 && g15b > 1.3 && g2 > 1.3 && g3 > 1.3,
           "A_2 of |x|^a diverges outside the range: growth per doubling a=1.5: %.4g, %.4g; a=2: %.4g; a=3: %.4g", g15a, g15b, g2,
           g3);
    record("2.3e", g2 >= 2.0 && g3 >= 2.0, "growth factor >= 2 per doubling at a = 2, 3: %.4g, %.4g", g2, g3);
    record("2.3f", g15b >= 2.0, "growth factor >= 2 per doubling at a = 1.5 (>= p - 1): %.4g (grid scaling predicts 2^(a-p+1) = %.4g)",
           g15b, std::pow(2.0, 0.5));
    if (g15b < 2.0) mark_unattainable();
  }
}

// ---------------------------------------------------------------- 3. uniformity in m

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig c = default_config("square-uniformity");
  InequalityReport r = run_experiment(c);
  const double t = seconds_since(t0);
  auto x = [&](const char* k) { return r.extras.count(k) ? r.extras.at(k) : std::nan(""); };
  std::printf("      square-uniformity: N=%d, %d functions, m in [-%g, %g], w = |x|^%g, P(0) = %.6g\n", c.grid.N, c.family_size,
              c.get("m_max"), c.get("m_max"), c.get("beta"), x("profile_at_0"));
  record("3.1", r.gates_passed(), "identity gate (unweighted L^2 norm of S_m f independent of m) passed");
  record("3.2", x("profile_max_over_min") <= 1.25, "m-profile max/min %.6g <= 1.25", x("profile_max_over_min"));
  record("3.3", x("profile_max_over_m0") <= 1.25, "m-profile max / m=0 value %.6g <= 1.25", x("profile_max_over_m0"));
  record("3.4", x("slope_log_over_m0") <= 0.05, "LSQ slope vs log(1+|m|) / m=0 value %.4g <= 0.05", x("slope_log_over_m0"));
  record("3.5", t <= 600.0, "uniformity suite runtime %.1f s <= 600 s", t);
}

// ---------------------------------------------------------------- 4. inequality ratios

void ratio_case(const std::string& id, ExperimentConfig c, const std::string& label) {
  c.family_size = 100;
  InequalityReport r = run_experiment(c);
  const bool finite = std::isfinite(r.max_ratio) && r.max_ratio > 0.0;
  const double change = r.refinement_change.value_or(std::nan(""));
  record(id, r.gates_passed() && finite && r.refinement_change && change <= refinement_tolerance,
         "%s: %zu pairs, N=%d max ratio %.5g, N=%d max ratio %.5g, change %.3g <= 0.2", label.c_str(), r.rows.size(), c.grid.N,
         r.max_ratio, 2 * c.grid.N, r.refined_max_ratio.value_or(std::nan("")), change);
}

void criterion4() {
  struct Set {
    double p, q, alpha, beta;
  };
  int k = 0;
  for (Set st : {Set{2, 2, 0.5, -0.3}, Set{4, 4, 1.5, 0.5}, Set{1.5, 3, 0.25, 1.0}}) {
    ExperimentConfig c = default_config("kp-d");
    set(c, "p", st.p);
    set(c, "q", st.q);
    set(c, "alpha", st.alpha);
    set(c, "beta", st.beta);
    char label[160];
    std::snprintf(label, sizeof label, "kp-d (p,q,r)=(%g,%g,%g), v=|x|^%g, w=|x|^%g, s=1", st.p, st.q, 1.0 / (1.0 / st.p + 1.0 / st.q),
                  st.alpha, st.beta);
    ratio_case("4." + std::to_string(++k), c, label);
  }
  {
    ExperimentConfig c = default_config("kp-j");
    set(c, "alpha", 0.5);
    set(c, "beta", -0.3);
    ratio_case("4.4", c, "kp-j (p,q,r)=(2,2,1), v=|x|^0.5, w=|x|^-0.3, s=1");
  }
  {
    ExperimentConfig c = default_config("kp-variable");
    c.exponent = "two_value";
    ratio_case("4.5", c, "kp-variable, two-value p(.) in {2,3}, q(.) in {2.5,4}, s=1");
  }
  ratio_case("4.6", default_config("kp-lorentz"), "kp-lorentz, p=q=2, a=1, b=c=2, s=1");
  ratio_case("4.7", default_config("kp-morrey"), "kp-morrey, p=q=2, kappa=0.5, s=1");

  // r = 2/3 from p = q = 4/3: threshold s > n(1/r - 1) = 1/2
  ExperimentConfig c = default_config("kp-d");
  set(c, "p", 4.0 / 3.0);
  set(c, "q", 4.0 / 3.0);
  set(c, "s", 0.4);
  std::string msg;
  try {
    validate(c);
  } catch (const inadmissible_config& e) {
    msg = e.what();
  }
  record("4.8a", msg.find("s > max(0, n(1/r - 1))") != std::string::npos, "r=2/3, s=0.4 rejected: \"%s\"", msg.c_str());
  set(c, "s", 1.0);
  c.family_size = 10;
  c.params["refine"] = 0;
  bool ran = false;
  try {
    ran = run_experiment(c).gates_passed();
  } catch (const std::exception&) {
  }
  record("4.8b", ran, "r=2/3, s=1 accepted and measured");
}

// ---------------------------------------------------------------- 5. extrapolation tracer

void criterion5() {
  for (const char* ex : {"constant", "two_value"}) {
    ExperimentConfig c = default_config("trace");
    c.exponent = ex;
    TraceReport t = run_trace(c);
    std::map<char, double> per_step;  // leading roman numeral, minimum slack
    double theta = 0.0;
    std::set<int> inst;
    for (const auto& s : t.steps) {
      inst.insert(s.instance);
      const std::string num = s.step.substr(0, s.step.find(' '));
      const char key = num == "i" ? '1' : num == "ii" ? '2' : num == "iii" ? '3' : num == "iv" ? '4' : '5';
      per_step[key] = per_step.count(key) ? std::min(per_step[key], s.slack()) : s.slack();
      if (key == '1') theta = std::max(theta, s.lhs);
    }
    const std::string id = std::string("5.") + (ex[0] == 'c' ? "1" : "2");
    bool all = per_step.size() == 5 && t.all_hold();
    record(id + "a", all && inst.size() == 50,
           "%s exponents, %zu instances: min slack (i) %.3g (ii) %.3g (iii) %.3g (iv) %.3g (v) %.3g >= 0", ex, inst.size(),
           per_step['1'], per_step['2'], per_step['3'], per_step['4'], per_step['5']);
    record(id + "b", theta <= 1e-12, "%s exponents: max |theta1 + theta2 - 1| = %.3g <= 1e-12", ex, theta);
  }
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  std::printf("== 1. exact identities\n");
  criterion1();
  std::printf("== 2. function spaces and weights\n");
  criterion2();
  std::printf("== 3. uniformity of the square functions in m\n");
  criterion3();
  std::printf("== 4. inequality ratios\n");
  criterion4();
  std::printf("== 5. extrapolation tracer\n");
  criterion5();

  int pass = 0, documented = 0, failed = 0;
  for (const auto& it : items) {
    if (it.pass)
      ++pass;
    else if (it.unattainable)
      ++documented;
    else
      ++failed;
  }
  std::printf("== %d passed, %d failed (%d documented as unattainable), %.1f s\n", pass, documented + failed, documented,
              seconds_since(t0));
  return failed == 0 ? 0 : 1;
}
