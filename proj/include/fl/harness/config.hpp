// Experiment configuration: kinds, parameters, text parsing, canonical form and hash.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fl/grid.hpp"

namespace fl::harness {

struct KindInfo {
  std::string name;
  std::string statement;  // the inequality measured, in words
  std::vector<std::string> keys;  // numeric parameters the kind reads
};

inline const std::vector<KindInfo>& kinds() {
  static const std::vector<KindInfo> k = {
      {"kp-d", "|D^s(fg)|_{L^r(v^{r/p} w^{r/q})} vs |D^s f|_{L^p(v)}|g|_{L^q(w)} + |f|_{L^p(v)}|D^s g|_{L^q(w)}",
       {"s", "p", "q", "r", "alpha", "beta", "refine"}},
      {"kp-j", "as kp-d with J^s = (1 - Laplacian/4pi^2)^{s/2}", {"s", "p", "q", "r", "alpha", "beta", "refine"}},
      {"commutator-d", "|D^s(fg) - f D^s g|_{L^r(v^{r/p} w^{r/q})} vs |D^s f||g| + |grad f||D^{s-1} g|",
       {"s", "p", "q", "r", "alpha", "beta", "refine"}},
      {"commutator-j", "as commutator-d with J^s and J^{s-1}", {"s", "p", "q", "r", "alpha", "beta", "refine"}},
      {"kp-variable", "|D^s(fg)|_{r(.)} vs |D^s f|_{p(.)}|g|_{q(.)} + |f|_{p(.)}|D^s g|_{q(.)}, 1/r(.) = 1/p(.) + 1/q(.)",
       {"s", "p_left", "p_right", "q_left", "q_right", "refine"}},
      {"fefferman-stein", "|(sum_k (M f_k)^q)^{1/q}|_{L^p(w)} vs |(sum_k |f_k|^q)^{1/q}|_{L^p(w)}, k = 0..8",
       {"p", "q", "beta", "refine"}},
      {"lp-square", "|(sum_k |phi_k * f|^2)^{1/2}|_{L^p(w)} vs |f|_{L^p(w)} (two-sided)", {"p", "beta", "refine"}},
      {"square-uniformity", "max over |m| <= m_max of |S_m f|_{L^2(w)} / |f|_{L^2(w)}: flat in m", {"beta", "m_max", "refine"}},
      {"lp-synthesis", "|sum_k phi_k * f_k|_{L^p(w)} vs |(sum_k |f_k|^2)^{1/2}|_{L^p(w)}", {"p", "beta", "refine"}},
      {"translated-kernel", "sup_{k,|m|<=m_max} |Psi_{k,m} * f|_{L^p(w)} vs [w]_{A_p}^{1/p} |f|_{L^p(w)}",
       {"p", "beta", "m_max", "refine"}},
      {"ball-average", "| |B|^{-1} chi_B * f |_{L^p(w)} vs [w]_{A_p}^{1/p} |f|_{L^p(w)} over random balls",
       {"p", "beta", "refine"}},
      {"cm-multiplier", "|T_sigma(f,g)|_{L^r(v^{r/p} w^{r/q})} vs |f|_{L^p(v)}|g|_{L^q(w)}, sigma = Phi_1",
       {"p", "q", "r", "alpha", "beta", "refine"}},
      {"hst-multiplier", "as cm-multiplier with a rough degree-0 symbol of finite H^{(s,t)} dyadic norm",
       {"p", "q", "r", "alpha", "beta", "sobolev_s", "sobolev_t", "refine"}},
      {"kp-lorentz", "|D^s(fg)|_{L^{r,a}(w)} vs |D^s f|_{L^{p,b}(w)}|g|_{L^{q,c}(w)} + ..., 1/a = 1/b + 1/c",
       {"s", "p", "q", "r", "beta", "lorentz_a", "lorentz_b", "lorentz_c", "refine"}},
      {"kp-morrey", "|D^s(fg)|_{L^{r,kappa}} vs |D^s f|_{L^{p,kappa}}|g|_{L^{q,kappa}} + ...",
       {"s", "p", "q", "r", "kappa", "refine"}},
  };
  return k;
}

inline const KindInfo* find_kind(const std::string& name) {
  for (const auto& k : kinds())
    if (k.name == name) return &k;
  return nullptr;
}

struct ExperimentConfig {
  std::string kind;
  GridSpec grid{1, 512, 32.0};
  int family_size = 100;
  std::uint64_t seed = 1;
  std::string exponent = "two_value";  // constant | two_value | smooth (variable-exponent kinds and trace)
  std::map<std::string, double> params;

  double get(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw std::out_of_range("missing parameter '" + key + "'");
    return it->second;
  }
  bool has(const std::string& key) const { return params.count(key) != 0; }
};

// every numeric key any kind or the tracer understands, with its default
inline const std::map<std::string, double>& default_params() {
  static const std::map<std::string, double> d = {
      {"s", 1.0},         {"p", 2.0},         {"q", 2.0},         {"r", 0.0},  // r = 0: derived from p and q
      {"alpha", 0.0},     {"beta", 0.0},      {"kappa", 0.5},     {"lorentz_a", 1.0},
      {"lorentz_b", 2.0}, {"lorentz_c", 2.0}, {"p_left", 2.0},    {"p_right", 3.0},
      {"q_left", 2.5},    {"q_right", 4.0},   {"m_max", 8.0},     {"refine", 1.0},
      {"sobolev_s", 0.75}, {"sobolev_t", 0.75}, {"trace_p", 1.2}, {"trace_q", 1.2},
      {"gate_tol", 1e-8},  // identity gates; 0 makes every non-exact gate fail
  };
  return d;
}

inline ExperimentConfig default_config(const std::string& kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.params = default_params();
  if (kind == "square-uniformity") {
    c.grid = GridSpec(1, 1024, 32.0);
    c.family_size = 30;
    c.params["beta"] = 0.5;
    c.params["m_max"] = 64.0;
  } else if (kind == "fefferman-stein" || kind == "lp-square" || kind == "lp-synthesis" ||
             kind == "translated-kernel" || kind == "ball-average") {
    c.grid = GridSpec(1, 256, 32.0);
    c.family_size = 20;
    c.params["beta"] = 0.5;
  } else if (kind == "cm-multiplier" || kind == "hst-multiplier") {
    c.grid = GridSpec(1, 256, 32.0);
    c.family_size = 20;
  } else if (kind == "kp-morrey") {
    c.grid = GridSpec(1, 256, 32.0);
  } else if (kind == "trace") {
    c.grid = GridSpec(1, 256, 32.0);
    c.family_size = 50;
  }
  return c;
}

// ---------------------------------------------------------------- text form

inline std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline GridSpec parse_grid(const std::string& text) {
  std::stringstream ss(text);
  std::string a, b, c;
  if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
    throw std::invalid_argument("grid must be 'n,N,L'");
  return GridSpec(std::stoi(a), std::stoi(b), std::stod(c));
}

inline double parse_number(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("parameter '" + key + "' is not a number: '" + v + "'");
  }
  if (used != v.size()) throw std::invalid_argument("parameter '" + key + "' is not a number: '" + v + "'");
  return x;
}

inline void apply_setting(ExperimentConfig& c, const std::string& key_raw, const std::string& value_raw) {
  const std::string key = trim(key_raw), value = trim(value_raw);
  if (key == "kind") {
    if (!find_kind(value)) throw std::invalid_argument("unknown kind '" + value + "'");
    c.kind = value;
  } else if (key == "grid") {
    c.grid = parse_grid(value);
  } else if (key == "family_size") {
    c.family_size = int(parse_number(key, value));
    if (c.family_size < 1) throw std::invalid_argument("family_size must be >= 1");
  } else if (key == "seed") {
    c.seed = std::stoull(value);
  } else if (key == "exponent") {
    if (value != "constant" && value != "two_value" && value != "smooth")
      throw std::invalid_argument("exponent must be constant, two_value or smooth");
    c.exponent = value;
  } else if (default_params().count(key)) {
    c.params[key] = parse_number(key, value);
  } else {
    throw std::invalid_argument("unknown configuration key '" + key + "'");
  }
}

using Settings = std::vector<std::pair<std::string, std::string>>;

// "key = value" per line; '#' starts a comment
inline Settings parse_settings(std::istream& in) {
  Settings out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

inline Settings read_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  return parse_settings(in);
}

inline void apply_settings(ExperimentConfig& c, const Settings& s) {
  for (const auto& [k, v] : s) apply_setting(c, k, v);
}

inline void apply_text(ExperimentConfig& c, std::istream& in) { apply_settings(c, parse_settings(in)); }

inline void apply_file(ExperimentConfig& c, const std::string& path) { apply_settings(c, read_settings(path)); }

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// canonical text: fixed key order, shortest round-trip numbers
inline std::string canonical(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "kind=" << c.kind << "\n";
  os << "grid=" << c.grid.n << "," << c.grid.N << "," << format_double(c.grid.L) << "\n";
  os << "family_size=" << c.family_size << "\n";
  os << "seed=" << c.seed << "\n";
  os << "exponent=" << c.exponent << "\n";
  for (const auto& [k, v] : c.params) os << k << "=" << format_double(v) << "\n";
  return os.str();
}

inline std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char ch : canonical(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------- admissibility

inline void require(bool ok, const std::string& constraint) {
  if (!ok) throw inadmissible_config("inadmissible parameters: " + constraint);
}

inline bool is_even_integer(double s) { return s >= 0.0 && std::fmod(s, 2.0) == 0.0; }

// effective r, either given or 1/(1/p + 1/q)
inline double resolved_r(const ExperimentConfig& c) {
  double r = c.get("r");
  return r > 0.0 ? r : 1.0 / (1.0 / c.get("p") + 1.0 / c.get("q"));
}

// A_t membership of |x|^a on R^n: -n < a < n (t - 1)
inline void require_power_weight(double a, double t, int n, const std::string& what) {
  require(a > -n && a < n * (t - 1.0), what + " = |x|^" + format_double(a) + " must lie in A_" + format_double(t) +
                                           ", i.e. " + format_double(-n) + " < exponent < " + format_double(n * (t - 1.0)));
}

inline void require_smoothness(double s, double r, int n) {
  const double floor_s = std::max(0.0, n * (1.0 / r - 1.0));
  require(s > floor_s || is_even_integer(s), "s > max(0, n(1/r - 1)) = " + format_double(floor_s) +
                                                 " or s a non-negative even integer (got s = " + format_double(s) + ")");
}

inline void require_holder_triple(double p, double q, double r) {
  require(p > 1.0 && std::isfinite(p), "1 < p < inf");
  require(q > 1.0 && std::isfinite(q), "1 < q < inf");
  require(r > 0.5 && std::isfinite(r), "1/2 < r < inf");
  require(std::abs(1.0 / r - 1.0 / p - 1.0 / q) <= 1e-9, "1/r = 1/p + 1/q");
}

inline void validate(const ExperimentConfig& c) {
  const KindInfo* info = find_kind(c.kind);
  if (!info) throw std::invalid_argument("unknown kind '" + c.kind + "'");
  c.grid.validate();
  if (c.grid.n != 1) require(c.kind == "kp-d" || c.kind == "kp-j" || c.kind == "commutator-d" || c.kind == "commutator-j",
                             "two-dimensional grids are supported by kp-d, kp-j, commutator-d and commutator-j only");
  const int n = c.grid.n;
  const std::string& k = c.kind;
  require(c.get("gate_tol") >= 0.0, "gate_tol >= 0");
  const double p = c.get("p"), q = c.get("q"), s = c.get("s");

  if (k == "kp-d" || k == "kp-j" || k == "commutator-d" || k == "commutator-j" || k == "cm-multiplier" ||
      k == "hst-multiplier" || k == "kp-lorentz" || k == "kp-morrey") {
    const double r = resolved_r(c);
    require_holder_triple(p, q, r);
    if (k != "cm-multiplier" && k != "hst-multiplier") {
      require(s >= 0.0, "s >= 0");
      require_smoothness(s, r, n);
    }
    if (k == "commutator-d" || k == "commutator-j") require(s >= 1.0, "s >= 1 for the gradient form of the commutator bound");
    if (k == "kp-lorentz") {
      require_power_weight(c.get("beta"), std::min(p, q), n, "w");
      const double a = c.get("lorentz_a"), b = c.get("lorentz_b"), cc = c.get("lorentz_c");
      require(a > 0.0 && b > 0.0 && cc > 0.0, "0 < a, b, c");
      require(std::abs(1.0 / a - 1.0 / b - 1.0 / cc) <= 1e-9, "1/a = 1/b + 1/c");
    } else if (k == "kp-morrey") {
      const double kappa = c.get("kappa");
      require(kappa > 0.0 && kappa <= n, "0 < kappa <= n");
    } else if (k == "hst-multiplier") {
      const double ss = c.get("sobolev_s"), tt = c.get("sobolev_t");
      require(ss > 0.5 * n && ss <= n && tt > 0.5 * n && tt <= n, "n/2 < s, t <= n for the Sobolev indices");
      require(p > n / ss && q > n / tt, "p > n/s and q > n/t");
      require_power_weight(c.get("alpha"), p * ss / n, n, "v");
      require_power_weight(c.get("beta"), q * tt / n, n, "w");
    } else {
      require_power_weight(c.get("alpha"), p, n, "v");
      require_power_weight(c.get("beta"), q, n, "w");
    }
  } else if (k == "kp-variable") {
    const double pl = c.get("p_left"), pr = c.get("p_right"), ql = c.get("q_left"), qr = c.get("q_right");
    const double pm = c.exponent == "constant" ? pl : std::min(pl, pr), qm = c.exponent == "constant" ? ql : std::min(ql, qr);
    require(pm > 1.0 && qm > 1.0, "p_- > 1 and q_- > 1");
    require(std::isfinite(pr) && std::isfinite(qr), "bounded exponents");
    // some 1 < p < p_-, 1 < q < q_- must give s > n(1/r - 1); the infimum of 1/r is 1/p_- + 1/q_-
    const double floor_s = std::max(0.0, n * (1.0 / pm + 1.0 / qm - 1.0));
    require(s > floor_s || is_even_integer(s), "s > max(0, n(1/p_- + 1/q_- - 1)) = " + format_double(floor_s) +
                                                   " or s a non-negative even integer");
  } else if (k == "fefferman-stein") {
    require(p > 1.0 && q > 1.0 && std::isfinite(p) && std::isfinite(q), "1 < p, q < inf");
    require_power_weight(c.get("beta"), p, n, "w");
  } else {
    require(p > 1.0 && std::isfinite(p), "1 < p < inf");
    if (k == "square-uniformity") require(std::abs(p - 2.0) < 1e-15, "p = 2 for the uniformity profile");
    require_power_weight(c.get("beta"), p, n, "w");
    if (k == "square-uniformity" || k == "translated-kernel") require(c.get("m_max") >= 0.0, "m_max >= 0");
  }
}

}  // namespace fl::harness
