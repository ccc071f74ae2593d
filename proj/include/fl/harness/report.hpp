// CSV and JSON emission.  Output is a pure function of the report; runtime is opt-in.
#pragma once

#include <ostream>

#include <json.hpp>

#include "fl/harness/trace.hpp"

namespace fl::harness {

enum class Format { csv, json };

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw std::invalid_argument("format must be csv or json");
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline nlohmann::ordered_json config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["kind"] = c.kind;
  j["grid"] = {{"n", c.grid.n}, {"N", c.grid.N}, {"L", c.grid.L}};
  j["family_size"] = c.family_size;
  j["seed"] = c.seed;
  j["exponent"] = c.exponent;
  for (const auto& [k, v] : c.params) j["params"][k] = v;
  return j;
}

inline std::string config_columns_header(const ExperimentConfig& c) {
  std::string s = "grid_n,grid_N,grid_L,family_size,seed,exponent";
  for (const auto& kv : c.params) s += "," + kv.first;
  return s;
}

inline std::string config_columns(const ExperimentConfig& c) {
  std::string s = std::to_string(c.grid.n) + "," + std::to_string(c.grid.N) + "," + format_double(c.grid.L) + "," +
                  std::to_string(c.family_size) + "," + std::to_string(c.seed) + "," + c.exponent;
  for (const auto& kv : c.params) s += "," + format_double(kv.second);
  return s;
}

}  // namespace detail

inline void write_csv_header(std::ostream& os, const ExperimentConfig& c) {
  os << "kind,sample_id,lhs,rhs,ratio,tag," << detail::config_columns_header(c) << "\n";
}

inline void write_csv_rows(std::ostream& os, const InequalityReport& r) {
  const std::string tail = detail::config_columns(r.config);
  for (const auto& row : r.rows)
    os << r.config.kind << "," << row.sample_id << "," << format_double(row.lhs) << "," << format_double(row.rhs) << ","
       << format_double(row.ratio) << "," << detail::csv_field(row.tag) << "," << tail << "\n";
}

inline void write_csv(std::ostream& os, const InequalityReport& r) {
  write_csv_header(os, r.config);
  write_csv_rows(os, r);
}

inline nlohmann::ordered_json to_json(const InequalityReport& r, bool include_runtime = false) {
  nlohmann::ordered_json j;
  j["config"] = detail::config_json(r.config);
  j["hash"] = r.hash;
  auto& a = j["aggregates"];
  a["rows"] = r.rows.size();
  a["max_ratio"] = r.max_ratio;
  a["mean_ratio"] = r.mean_ratio;
  a["min_ratio"] = r.min_ratio;
  a["refined_max_ratio"] = r.refined_max_ratio ? nlohmann::ordered_json(*r.refined_max_ratio) : nlohmann::ordered_json();
  a["refinement_change"] = r.refinement_change ? nlohmann::ordered_json(*r.refinement_change) : nlohmann::ordered_json();
  a["stable"] = r.stable;
  j["gates"] = nlohmann::ordered_json::array();
  for (const auto& g : r.gates) j["gates"].push_back({{"name", g.name}, {"error", g.error}, {"tol", g.tol}, {"passed", g.passed}});
  j["extras"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.extras) j["extras"][k] = v;
  j["notes"] = r.notes;
  if (include_runtime) j["runtime_seconds"] = r.runtime_seconds;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows)
    j["rows"].push_back({{"sample_id", row.sample_id}, {"lhs", row.lhs}, {"rhs", row.rhs}, {"ratio", row.ratio}, {"tag", row.tag}});
  return j;
}

inline void emit(std::ostream& os, const InequalityReport& r, Format fmt, bool include_runtime = false) {
  if (fmt == Format::csv)
    write_csv(os, r);
  else
    os << to_json(r, include_runtime).dump(2) << "\n";
}

inline void emit(std::ostream& os, const std::vector<InequalityReport>& rs, Format fmt, bool include_runtime = false) {
  if (fmt == Format::csv) {
    if (rs.empty()) return;
    write_csv_header(os, rs.front().config);
    for (const auto& r : rs) write_csv_rows(os, r);
  } else {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rs) arr.push_back(to_json(r, include_runtime));
    os << arr.dump(2) << "\n";
  }
}

inline void emit(std::ostream& os, const TraceReport& t, Format fmt, bool include_runtime = false) {
  if (fmt == Format::csv) {
    os << "kind,instance,step,lhs,rhs,slack\n";
    for (const auto& s : t.steps)
      os << "trace," << s.instance << "," << detail::csv_field(s.step) << "," << format_double(s.lhs) << ","
         << format_double(s.rhs) << "," << format_double(s.slack()) << "\n";
    return;
  }
  nlohmann::ordered_json j;
  j["config"] = detail::config_json(t.config);
  j["hash"] = t.hash;
  j["A1"] = t.A1;
  j["A2"] = t.A2;
  j["min_slack"] = t.min_slack();
  j["all_hold"] = t.all_hold();
  j["notes"] = t.notes;
  if (include_runtime) j["runtime_seconds"] = t.runtime_seconds;
  j["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : t.steps)
    j["steps"].push_back({{"instance", s.instance}, {"step", s.step}, {"lhs", s.lhs}, {"rhs", s.rhs}, {"slack", s.slack()}});
  os << j.dump(2) << "\n";
}

}  // namespace fl::harness
