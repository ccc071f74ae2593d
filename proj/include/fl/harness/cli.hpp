// leibniz command line: verify <kind>, sweep, trace, list-kinds.
// Exit codes: 0 all gates passed, 2 identity gate failed, 3 inadmissible configuration, 1 other errors.
#pragma once

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fl/harness/report.hpp"

namespace fl::harness {

struct CommonOptions {
  std::string config_path, out_path, format = "csv", grid;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  bool timing = false;
};

inline void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config_path, "key = value config file");
  app->add_option("--seed", o.seed, "family seed");
  app->add_option("--out", o.out_path, "output file (default stdout)");
  app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--grid", o.grid, "n,N,L");
  app->add_option("--set", o.sets, "key=value override, repeatable");
  app->add_flag("--timing", o.timing, "include runtime in json output");
}

// defaults for the kind, then the config file, then --grid/--seed, then --set
inline ExperimentConfig build_config(std::string kind, const CommonOptions& o, bool is_trace = false) {
  Settings file;
  if (!o.config_path.empty()) file = read_settings(o.config_path);
  if (kind.empty() && !is_trace)
    for (const auto& [k, v] : file)
      if (k == "kind") kind = v;
  if (kind.empty()) throw std::invalid_argument("no kind given (positional argument or 'kind =' in the config)");
  if (!is_trace && !find_kind(kind)) throw std::invalid_argument("unknown kind '" + kind + "'");
  ExperimentConfig c = default_config(kind);
  for (const auto& [k, v] : file)
    if (k != "kind") apply_setting(c, k, v);
  if (!o.grid.empty()) c.grid = parse_grid(o.grid);
  if (o.seed) c.seed = *o.seed;
  for (const auto& s : o.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    if (trim(s.substr(0, eq)) == "kind") throw std::invalid_argument("kind cannot be changed with --set");
    apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  return c;
}

template <class R>
void write_out(const CommonOptions& o, const R& report, std::ostream& out) {
  const Format fmt = parse_format(o.format);
  if (o.out_path.empty()) {
    emit(out, report, fmt, o.timing);
    return;
  }
  std::ofstream f(o.out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + o.out_path);
  emit(f, report, fmt, o.timing);
}

inline void summarize(std::ostream& err, const InequalityReport& r) {
  for (const auto& g : r.gates)
    if (!g.passed) err << "gate failed: " << g.name << " error " << format_double(g.error) << " > " << format_double(g.tol) << "\n";
  if (r.gates_passed()) {
    err << r.config.kind << ": " << r.rows.size() << " rows, max ratio " << format_double(r.max_ratio);
    if (r.refinement_change) err << ", refinement change " << format_double(*r.refinement_change) << (r.stable ? "" : " (unstable)");
    err << "\n";
  }
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"numerical checks of weighted and variable-exponent Kato-Ponce inequalities"};
  app.require_subcommand(1);

  CommonOptions vo, so, to;
  std::string vkind, skind, param, values;

  auto* verify = app.add_subcommand("verify", "run one experiment kind");
  verify->add_option("kind", vkind, "experiment kind (see list-kinds)");
  add_common(verify, vo);

  auto* sweep = app.add_subcommand("sweep", "run a kind once per value of one parameter");
  sweep->add_option("--kind", skind, "experiment kind");
  sweep->add_option("--param", param, "parameter to vary")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();
  add_common(sweep, so);

  auto* trace = app.add_subcommand("trace", "trace the extrapolation argument on random instances");
  add_common(trace, to);

  auto* list = app.add_subcommand("list-kinds", "list experiment kinds and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*list) {
      for (const auto& k : kinds()) {
        out << k.name << "\n  " << k.statement << "\n  parameters:";
        for (const auto& key : k.keys) out << " " << key;
        out << "\n";
      }
      return 0;
    }
    if (*verify) {
      ExperimentConfig c = build_config(vkind, vo);
      InequalityReport r = run_experiment(c);
      write_out(vo, r, out);
      summarize(err, r);
      return r.gates_passed() ? 0 : 2;
    }
    if (*sweep) {
      ExperimentConfig base = build_config(skind, so);
      std::vector<InequalityReport> reports;
      std::stringstream ss(values);
      std::string v;
      bool all = true;
      while (std::getline(ss, v, ',')) {
        ExperimentConfig c = base;
        apply_setting(c, param, v);
        reports.push_back(run_experiment(c));
        summarize(err, reports.back());
        all = all && reports.back().gates_passed();
      }
      write_out(so, reports, out);
      return all ? 0 : 2;
    }
    ExperimentConfig c = build_config("trace", to, true);
    TraceReport t = run_trace(c);
    write_out(to, t, out);
    err << "trace: " << t.steps.size() << " links, min slack " << format_double(t.min_slack()) << "\n";
    return t.all_hold() ? 0 : 2;
  } catch (const inadmissible_config& e) {
    err << e.what() << "\n";
    return 3;
  } catch (const identity_gate_failure& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fl::harness
