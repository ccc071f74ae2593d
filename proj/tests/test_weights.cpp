#include <gtest/gtest.h>

#include <random>

#include "fl/weights.hpp"

using namespace fl;

namespace {

// every periodic grid cube containing each point, by direct summation
GridFunction brute_maximal(const GridFunction& f) {
  const GridSpec& spec = f.spec;
  const int N = spec.N;
  GridFunction out(spec);
  if (spec.n == 1) {
    for (int s = 0; s < N; ++s)
      for (int len = 1; len <= N; ++len) {
        double sum = 0.0;
        for (int i = 0; i < len; ++i) sum += std::abs(f[std::size_t((s + i) % N)]);
        for (int i = 0; i < len; ++i) {
          auto& o = out[std::size_t((s + i) % N)];
          o = std::max(o.real(), sum / len);
        }
      }
    return out;
  }
  for (int s0 = 0; s0 < N; ++s0)
    for (int s1 = 0; s1 < N; ++s1)
      for (int len = 1; len <= N; ++len) {
        double sum = 0.0;
        for (int a = 0; a < len; ++a)
          for (int b = 0; b < len; ++b) sum += std::abs(f[std::size_t((s0 + a) % N) * N + std::size_t((s1 + b) % N)]);
        sum /= double(len) * len;
        for (int a = 0; a < len; ++a)
          for (int b = 0; b < len; ++b) {
            auto& o = out[std::size_t((s0 + a) % N) * N + std::size_t((s1 + b) % N)];
            o = std::max(o.real(), sum);
          }
      }
  return out;
}

double brute_ap_1d(const Weight& w, double p) {
  const int N = w.spec().N;
  double best = 0.0;
  for (int s = 0; s < N; ++s)
    for (int len = 1; len <= N; ++len) {
      double a = 0.0, b = 0.0, mx = 0.0;
      for (int i = 0; i < len; ++i) {
        double v = w[std::size_t((s + i) % N)];
        a += v;
        if (p > 1.0) b += std::pow(v, -1.0 / (p - 1.0));
        mx = std::max(mx, 1.0 / v);
      }
      a /= len;
      best = std::max(best, p > 1.0 ? a * std::pow(b / len, p - 1.0) : a * mx);
    }
  return best;
}

GridFunction random_positive(const GridSpec& spec, std::uint64_t seed) {
  auto f = random_bandlimited(spec, seed);
  return sample(spec, [&, i = std::size_t(0)](const Vec&) mutable { return std::exp(f[i++].real()); });
}

}  // namespace

// ---------------------------------------------------------------- weights

TEST(Weights, ConstructorsValidate) {
  GridSpec spec(1, 64, 4.0);
  EXPECT_THROW(custom_weight(constant(spec, -1.0)), std::invalid_argument);
  EXPECT_THROW(power_weight(spec, -1.0), std::invalid_argument);
  EXPECT_THROW(two_value_weight(spec, 0.0), std::invalid_argument);
  EXPECT_NO_THROW(power_weight(spec, -0.9));
  EXPECT_NO_THROW(power_weight(GridSpec(2, 16, 4.0), -1.9));
}

TEST(Weights, PowerWeightCellAverages) {
  GridSpec spec(1, 256, 8.0);
  auto w = power_weight(spec, 0.5);
  const double h = spec.h();
  // integral of |x|^{1/2} over [x_0 - h/2, x_N-1 + h/2] = [-L/2 - h/2, L/2 - h/2]
  double exact = (std::pow(4.0 + 0.5 * h, 1.5) + std::pow(4.0 - 0.5 * h, 1.5)) / 1.5;
  EXPECT_NEAR(integral(w.samples), exact, 1e-11);
  EXPECT_NEAR(w[std::size_t(spec.N / 2)], std::pow(0.5 * h, 0.5) / 1.5, 1e-14);
}

// ---------------------------------------------------------------- maximal operator

TEST(Maximal, IndicatorAtTwo) {
  GridSpec spec(1, 1024, 32.0);
  auto f = sample(spec, [](const Vec& x) { return x[0] >= 0.0 && x[0] < 1.0 ? 1.0 : 0.0; });
  auto Mf = maximal(f);
  auto ref = brute_maximal(f);
  const std::size_t at2 = std::size_t((2.0 + 16.0) / spec.h());
  EXPECT_NEAR(spec.point(at2)[0], 2.0, 1e-14);
  EXPECT_NEAR(Mf[at2].real(), ref[at2].real(), 1e-14);
  // 32 unit cells out of the 65 between 0 and 2 inclusive
  EXPECT_NEAR(Mf[at2].real(), 32.0 / 65.0, 1e-14);
  EXPECT_NEAR(Mf[at2].real(), 0.5, 2.0 * spec.h());
}

TEST(Maximal, MatchesBruteForce1D) {
  GridSpec spec(1, 128, 8.0);
  auto f = random_bandlimited(spec, 4);
  EXPECT_LE(max_abs_diff(maximal(f), brute_maximal(f)), 1e-13);
}

TEST(Maximal, MatchesBruteForce2D) {
  GridSpec spec(2, 16, 4.0);
  auto f = random_bandlimited(spec, 5);
  EXPECT_LE(max_abs_diff(maximal(f), brute_maximal(f)), 1e-13);
}

TEST(Maximal, DominatesModulusAndFixesConstants) {
  for (auto spec : {GridSpec(1, 256, 16.0), GridSpec(2, 32, 8.0)}) {
    auto f = random_bandlimited(spec, 6);
    auto Mf = maximal(f);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_GE(Mf[i].real(), std::abs(f[i]) - 1e-15);
    EXPECT_LE(max_abs_diff(maximal(constant(spec, 2.5)), constant(spec, 2.5)), 1e-14);
  }
}

// the periodic interval operator stays below the sharp line constant 1 + sqrt 2 on L^2
TEST(Maximal, ProbedNormBelowSharpConstant) {
  GridSpec spec(1, 256, 16.0);
  auto norm2_ = [](const GridFunction& f) { return weighted_lp_norm(f, 2.0); };
  double A = estimate_maximal_norm(spec, norm2_, 60, 3, {}, 1.0);
  EXPECT_GT(A, 1.0);
  EXPECT_LE(A, 1.0 + std::sqrt(2.0));
}

// ---------------------------------------------------------------- A_p

TEST(Ap, UnitWeightIsOne) {
  for (auto spec : {GridSpec(1, 128, 8.0), GridSpec(2, 16, 4.0)})
    for (double p : {1.0, 1.5, 2.0, 3.0}) EXPECT_NEAR(ap_characteristic(constant_weight(spec), p).characteristic, 1.0, 1e-13);
}

TEST(Ap, TwoValueClosedFormAndBruteForce) {
  GridSpec spec(1, 128, 8.0);
  auto w = two_value_weight(spec, 4.0);
  auto rep = ap_characteristic(w, 2.0);
  EXPECT_NEAR(rep.characteristic, brute_ap_1d(w, 2.0), 1e-10);
  EXPECT_NEAR(rep.characteristic, (2.0 + 4.0 + 0.25) / 4.0, 1e-10);
  // the witness interval straddles a jump with equal parts on each side
  int left = 0;
  for (int i = 0; i < rep.witness.side; ++i) left += spec.x((rep.witness.start0 + i) % spec.N) < 0.0 ? 1 : 0;
  EXPECT_EQ(2 * left, rep.witness.side);
}

TEST(Ap, MatchesBruteForceOnRandomWeights) {
  GridSpec spec(1, 64, 4.0);
  for (std::uint64_t seed : {1, 2, 3}) {
    auto w = custom_weight(random_positive(spec, seed));
    for (double p : {1.0, 1.5, 3.0}) EXPECT_NEAR(ap_characteristic(w, p).characteristic, brute_ap_1d(w, p), 1e-10);
  }
}

TEST(Ap, JensenLowerBound) {
  for (auto spec : {GridSpec(1, 128, 8.0), GridSpec(2, 16, 4.0)}) {
    auto w = custom_weight(random_positive(spec, 9));
    for (double p : {1.0, 1.2, 2.0, 4.0}) EXPECT_GE(ap_characteristic(w, p).characteristic, 1.0 - 1e-12);
  }
}

TEST(Ap, ScalingInvariance) {
  GridSpec spec(1, 128, 8.0);
  auto w = custom_weight(random_positive(spec, 10));
  for (double p : {1.0, 2.0, 3.0}) {
    double base = ap_characteristic(w, p).characteristic;
    for (double c : {8.0, 3.7, 1e-3})
      EXPECT_NEAR(ap_characteristic(custom_weight(scaled(w.samples, c)), p).characteristic, base, 1e-13 * base) << c;
  }
}

TEST(Ap, A1ContainedInAp) {
  GridSpec spec(1, 256, 16.0);
  std::vector<Weight> ws = {power_weight(spec, -0.5), power_weight(spec, 0.3), two_value_weight(spec, 5.0),
                            custom_weight(random_positive(spec, 12))};
  for (const auto& w : ws) {
    double a1 = ap_characteristic(w, 1.0).characteristic;
    for (double p : {1.1, 1.5, 2.0, 4.0}) EXPECT_LE(ap_characteristic(w, p).characteristic, a1 + 1e-10);
  }
}

TEST(Ap, PowerWeightRefinement) {
  auto ch = [](int N, double a) { return ap_characteristic(power_weight(GridSpec(1, N, 16.0), a), 2.0).characteristic; };
  // inside the admissible range the characteristic settles
  double c512 = ch(512, 0.5), c1024 = ch(1024, 0.5);
  EXPECT_LE(std::abs(c1024 / c512 - 1.0), 0.02);
  // a = 3/2 >= p - 1: unbounded, growing like N^{a - p + 1}
  double g = ch(1024, 1.5) / ch(512, 1.5);
  EXPECT_GT(g, 1.3);
  // a = 2 = p grows by about 2 per doubling
  EXPECT_GE(ch(1024, 2.0) / ch(512, 2.0), 1.9);
}

TEST(Ap, OverflowIsReported) {
  GridSpec spec(1, 64, 4.0);
  auto w = custom_weight(sample(spec, [](const Vec& x) { return x[0] < 0.0 ? 1e-300 : 1e300; }));
  EXPECT_THROW(ap_characteristic(w, 1.01), std::overflow_error);
}

// ---------------------------------------------------------------- Rubio de Francia

TEST(Rubio, MajorisesAndCertifiesA1) {
  GridSpec spec(1, 256, 16.0);
  auto two = constant_exponent(spec, 2.0);
  const double A = 1.0 + std::sqrt(2.0);
  auto tau = modulus(random_bandlimited(spec, 15));
  auto res = rubio_iterate(tau, two, A, 12);
  for (std::size_t i = 0; i < tau.size(); ++i) EXPECT_GE(res.R[i].real(), tau[i].real());
  EXPECT_LE(variable_norm(res.R, two), 2.0 * variable_norm(tau, two));
  EXPECT_LE(a1_characteristic(res.R), 2.0 * A * (1.0 + res.eps) + 1e-12);
  EXPECT_LT(res.tail, 1e-3 * variable_norm(tau, two));
}

// the certificate holds even when A underestimates the operator norm
TEST(Rubio, CertificateHoldsForAnyA) {
  GridSpec spec(1, 128, 8.0);
  auto p = two_value_exponent(spec, 1.6, 3.0);
  auto tau = modulus(random_bandlimited(spec, 16));
  for (double A : {0.6, 1.0, 3.0}) {
    auto res = rubio_iterate(tau, p, A, 6);
    EXPECT_LE(a1_characteristic(res.R), 2.0 * A * (1.0 + res.eps) * (1.0 + 1e-12)) << A;
  }
}

TEST(Rubio, RejectsBadInput) {
  GridSpec spec(1, 64, 4.0);
  auto two = constant_exponent(spec, 2.0);
  EXPECT_THROW(rubio_iterate(constant(spec, 1.0), two, 0.0), std::invalid_argument);
  EXPECT_THROW(rubio_iterate(constant(spec, -1.0), two, 2.0), std::invalid_argument);
  EXPECT_THROW(rubio_iterate(constant(spec, 1.0), two, 2.0, 0), std::invalid_argument);
}

// ---------------------------------------------------------------- ball averages

TEST(BallAverage, ConstantIsFixed) {
  for (auto spec : {GridSpec(1, 256, 16.0), GridSpec(2, 32, 8.0)})
    EXPECT_LE(max_abs_diff(average_over_ball(constant(spec, 3.0), {0.3, -0.2}, 1.0), constant(spec, 3.0)), 1e-13);
}

TEST(BallAverage, CosineClosedForm1D) {
  GridSpec spec(1, 256, 16.0);
  const double k = 2.0 * pi * 3.0 / spec.L, r = 1.3, c = 0.7;
  auto f = sample(spec, [&](const Vec& x) { return std::cos(k * x[0]); });
  auto A = average_over_ball(f, {c, 0.0}, r);
  auto ref = sample(spec, [&](const Vec& x) { return std::cos(k * (x[0] - c)) * std::sin(k * r) / (k * r); });
  EXPECT_LE(max_abs_diff(A, ref), 1e-13);
}

TEST(BallAverage, CosineClosedForm2D) {
  GridSpec spec(2, 32, 8.0);
  const double k = 2.0 * pi * 2.0 / spec.L, r = 1.1;
  auto f = sample(spec, [&](const Vec& x) { return std::cos(k * x[1]); });
  auto A = average_over_ball(f, {0.0, 0.0}, r);
  const double factor = 2.0 * std::cyl_bessel_j(1.0, k * r) / (k * r);
  auto ref = scaled(f, factor);
  EXPECT_LE(max_abs_diff(A, ref), 1e-13);
}

TEST(BallAverage, RadiusLimits) {
  GridSpec spec(1, 64, 4.0);
  auto f = constant(spec, 1.0);
  EXPECT_THROW(average_over_ball(f, {0.0, 0.0}, 0.5 * spec.h()), std::invalid_argument);
  EXPECT_THROW(average_over_ball(f, {0.0, 0.0}, 2.5), std::invalid_argument);
  EXPECT_NO_THROW(average_over_ball(f, {0.0, 0.0}, spec.h()));
}

namespace {
double ball_ratio_max(int N, int balls) {
  GridSpec spec(1, N, 16.0);
  auto w = power_weight(spec, 0.5);
  double ap = ap_characteristic(w, 2.0).characteristic;
  std::mt19937_64 rng(40);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double best = 0.0;
  for (int k = 0; k < balls; ++k) {
    Vec c{(unif(rng) - 0.5) * spec.L, 0.0};
    double r = 0.0625 + 3.0 * unif(rng);
    auto f = random_bandlimited(GridSpec(1, N, 16.0), rng(), 2.0);
    double lhs = weighted_lp_norm(average_over_ball(f, c, r), 2.0, w.samples);
    best = std::max(best, lhs / (std::sqrt(ap) * weighted_lp_norm(f, 2.0, w.samples)));
  }
  return best;
}
}  // namespace

TEST(BallAverage, WeightedBoundStableUnderRefinement) {
  double c1 = ball_ratio_max(512, 20), c2 = ball_ratio_max(1024, 20);
  EXPECT_LT(c1, 1.0);
  EXPECT_LE(std::abs(c2 / c1 - 1.0), 0.2);
}

TEST(BallAverage, StaircaseMajorantUniformInShift) {
  GridSpec spec(1, 512, 16.0);
  auto w = power_weight(spec, 0.5);
  double ap = ap_characteristic(w, 2.0).characteristic;
  auto st = gaussian_staircase(1.0, {0.0625, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0});
  for (std::size_t i = 1; i < st.coeffs.size(); ++i) EXPECT_GE(st.coeffs[i], 0.0);
  auto f = random_bandlimited(spec, 41, 2.0);
  const double den = st.l1_norm(1) * std::sqrt(ap) * weighted_lp_norm(f, 2.0, w.samples);
  double lo = 1e300, hi = 0.0;
  for (double z : {-6.0, -3.0, -1.0, 0.0, 0.5, 2.0, 4.5, 7.0}) {
    double r = weighted_lp_norm(apply_staircase(f, st, {z, 0.0}), 2.0, w.samples) / den;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_LT(hi, 1.0);
  EXPECT_LT(hi / lo, 3.0);
}

TEST(BallAverage, StaircaseBelowGaussian) {
  auto st = gaussian_staircase(1.0, {0.1, 0.3, 0.6, 1.0, 1.5});
  for (double r = 0.0; r < 3.0; r += 0.01) EXPECT_LE(st(r), std::exp(-pi * r * r) + 1e-15) << r;
  EXPECT_NEAR(st(0.0), std::exp(-pi * 0.01), 1e-15);
}

// ---------------------------------------------------------------- Rademacher

TEST(Rademacher, Values) {
  EXPECT_EQ(rademacher(0, 0.25), -1);
  EXPECT_EQ(rademacher(0, 0.5), 1);
  EXPECT_EQ(rademacher(1, 0.3), 1);
  EXPECT_EQ(rademacher(2, 0.3), -1);
  EXPECT_THROW(rademacher(-1, 0.1), std::invalid_argument);
}

TEST(Rademacher, OrthonormalAtDyadicMidpoints) {
  const int M = 1 << 12;
  for (int j = 0; j <= 8; ++j)
    for (int k = 0; k <= 8; ++k) {
      double s = 0.0;
      for (int i = 0; i < M; ++i) {
        double t = (i + 0.5) / M;
        s += rademacher(j, t) * rademacher(k, t);
      }
      EXPECT_NEAR(s / M, j == k ? 1.0 : 0.0, 1e-12) << j << "," << k;
    }
}

TEST(Rademacher, Parseval) {
  const int M = 1 << 12;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  std::vector<double> a(9);
  double sa = 0.0;
  for (auto& v : a) {
    v = gauss(rng);
    sa += v * v;
  }
  double s = 0.0;
  for (int i = 0; i < M; ++i) {
    double t = (i + 0.5) / M, v = 0.0;
    for (int k = 0; k <= 8; ++k) v += a[std::size_t(k)] * rademacher(k, t);
    s += v * v;
  }
  EXPECT_NEAR(std::sqrt(s / M), std::sqrt(sa), 1e-12);
}

// ---------------------------------------------------------------- Fefferman-Stein

TEST(FeffermanStein, VectorValuedRatioStable) {
  GridSpec spec(1, 256, 16.0);
  std::mt19937_64 rng(50);
  for (double p : {1.5, 2.0, 3.0})
    for (double q : {1.5, 2.0, 3.0}) {
      auto w = power_weight(spec, p > 1.5 ? 0.5 : 0.25);
      double lo = 1e300, hi = 0.0;
      for (int seq = 0; seq < 10; ++seq) {
        GridFunction lhs(spec), rhs(spec);
        for (int k = 0; k <= 8; ++k) {
          auto f = random_bandlimited(spec, rng(), 0.5 * (k + 1) / 9.0 * spec.N / (4.0 * spec.L) + 0.05);
          auto Mf = maximal(f);
          for (std::size_t i = 0; i < f.size(); ++i) {
            lhs[i] += std::pow(Mf[i].real(), q);
            rhs[i] += std::pow(std::abs(f[i]), q);
          }
        }
        for (auto& v : lhs.values) v = std::pow(v.real(), 1.0 / q);
        for (auto& v : rhs.values) v = std::pow(v.real(), 1.0 / q);
        double r = weighted_lp_norm(lhs, p, w.samples) / weighted_lp_norm(rhs, p, w.samples);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      EXPECT_GE(lo, 1.0) << p << "," << q;
      EXPECT_LE(hi / lo, 1.5) << p << "," << q;
    }
}
