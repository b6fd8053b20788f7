#include "flexplan/artifacts.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "flexplan/errors.hpp"

namespace flexplan {

using nlohmann::json;

std::string current_timestamp() {
  if (const char* fixed = std::getenv("FLEXPLAN_TIMESTAMP")) return fixed;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string hash_text(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string hash_file(const std::filesystem::path& path) { return hash_text(read_text(path)); }

json meta_json(const ArtifactMeta& meta) {
  json j;
  j["kind"] = meta.kind;
  j["seed"] = meta.seed ? json(*meta.seed) : json(nullptr);
  if (meta.evaluation_seed) j["evaluation_seed"] = *meta.evaluation_seed;
  j["config_hash"] = meta.config_hash.empty() ? json(nullptr) : json(meta.config_hash);
  if (!meta.config_path.empty()) j["config_path"] = meta.config_path;
  if (!meta.input_hash.empty()) j["input_hash"] = meta.input_hash;
  j["timestamp"] = meta.timestamp;
  return j;
}

ArtifactMeta meta_from_json(const json& j) {
  ArtifactMeta m;
  if (!j.is_object()) return m;
  m.kind = j.value("kind", "");
  if (j.contains("seed") && j["seed"].is_number_unsigned()) m.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("evaluation_seed")) m.evaluation_seed = j["evaluation_seed"].get<std::uint64_t>();
  if (j.contains("config_hash") && j["config_hash"].is_string()) m.config_hash = j["config_hash"];
  m.config_path = j.value("config_path", "");
  m.input_hash = j.value("input_hash", "");
  m.timestamp = j.value("timestamp", "");
  return m;
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_gamma(std::string_view text) {
  std::string t(text);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
  if (t == "inf" || t == "infinity" || t == "Inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !(v >= 0.0)) {
    throw Error(ErrorKind::kValidationError, "gamma must be a non-negative number or inf, got '" + t + "'",
                "/gammas");
  }
  return v;
}

std::vector<double> parse_gamma_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_gamma(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) throw Error(ErrorKind::kValidationError, "gammas must increase", "/gammas");
  }
  return out;
}

json scenarios_json(const ScenarioSet& set) {
  json arr = json::array();
  for (const Scenario& s : set.scenarios) arr.push_back({{"id", s.id}, {"delays", s.delays}, {"p", s.p}});
  return arr;
}

ScenarioSet scenarios_from_json(const json& j, ScenarioRole role) {
  const json& arr = j.is_object() && j.contains("scenarios") ? j["scenarios"] : j;
  if (!arr.is_array()) throw Error(ErrorKind::kParseError, "scenario file must hold an array", "/");
  ScenarioSet set;
  set.role = role;
  if (j.is_object() && j.contains("metadata")) {
    const ArtifactMeta m = meta_from_json(j["metadata"]);
    if (m.seed) set.seed = *m.seed;
  }
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& e = arr[i];
    const std::string path = "/" + std::to_string(i);
    if (!e.is_object() || !e.contains("delays") || !e["delays"].is_array()) {
      throw Error(ErrorKind::kParseError, "scenario needs a delays array", path);
    }
    Scenario s;
    s.id = e.value("id", static_cast<int>(i));
    for (const json& d : e["delays"]) {
      if (!d.is_number_integer() || d.get<long>() < 0) {
        throw Error(ErrorKind::kValidationError, "delays must be non-negative whole days", path + "/delays");
      }
      s.delays.push_back(d.get<int>());
    }
    s.p = e.value("p", 1.0 / static_cast<double>(arr.size()));
    set.scenarios.push_back(std::move(s));
  }
  validate_scenario_set(set);
  return set;
}

void write_scenarios(const std::filesystem::path& path, const ScenarioSet& set, const ArtifactMeta& meta) {
  write_json(path, scenarios_json(set));
  std::filesystem::path side = path;
  side += ".meta.json";
  write_json(side, meta_json(meta));
}

ScenarioSet read_scenarios(const std::filesystem::path& path, ScenarioRole role) {
  ScenarioSet set = scenarios_from_json(read_json(path), role);
  std::filesystem::path side = path;
  side += ".meta.json";
  if (std::filesystem::exists(side)) {
    const ArtifactMeta m = meta_from_json(read_json(side));
    if (m.seed) set.seed = *m.seed;
  }
  return set;
}

namespace {

json one_rule(const DecisionRuleSet& r, const CommodityList& commodities) {
  json launches = json::array();
  for (std::size_t l = 0; l < r.R.size(); ++l) {
    json R = json::object();
    for (int e : commodities.rule_commodities()) R[commodities[static_cast<std::size_t>(e)].id] = r.R[l][static_cast<std::size_t>(e)];
    launches.push_back({{"l", l + 1}, {"launch", r.launches[l]}, {"R", R}});
  }
  return {{"station", r.station}, {"launches", launches}};
}

DecisionRuleSet rule_from(const json& j, const CommodityList& commodities, const std::string& path) {
  if (!j.is_object() || !j.contains("station") || !j.contains("launches") || !j["launches"].is_array()) {
    throw Error(ErrorKind::kParseError, "rule set needs station and launches", path);
  }
  DecisionRuleSet r;
  r.station = j["station"].get<std::string>();
  const json& ls = j["launches"];
  r.R.assign(ls.size(), std::vector<double>(commodities.size(), 0.0));
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const std::string lp = path + "/launches/" + std::to_string(i);
    const json& e = ls[i];
    if (e.value("l", static_cast<int>(i + 1)) != static_cast<int>(i + 1)) {
      throw Error(ErrorKind::kValidationError, "launches must be listed in order", lp + "/l");
    }
    if (!e.contains("launch")) throw Error(ErrorKind::kParseError, "missing global launch index", lp);
    r.launches.push_back(e["launch"].get<int>());
    if (!e.contains("R")) continue;
    for (const auto& [id, v] : e["R"].items()) {
      const auto c = commodities.find(id);
      if (!c) throw Error(ErrorKind::kMissingCommodity, "unknown commodity '" + id + "'", lp + "/R/" + id);
      if (!v.is_number() || v.get<double>() < 0.0) {
        throw Error(ErrorKind::kValidationError, "targets must be non-negative", lp + "/R/" + id);
      }
      r.R[i][static_cast<std::size_t>(*c)] = v.get<double>();
    }
  }
  return r;
}

json number_or_string(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

}  // namespace

json rules_json(const std::vector<DecisionRuleSet>& rules, const CommodityList& commodities) {
  if (rules.size() == 1) return one_rule(rules.front(), commodities);
  json arr = json::array();
  for (const DecisionRuleSet& r : rules) arr.push_back(one_rule(r, commodities));
  return {{"stations", arr}};
}

std::vector<DecisionRuleSet> rules_from_json(const json& j, const CommodityList& commodities) {
  std::vector<DecisionRuleSet> out;
  if (j.is_object() && j.contains("stations")) {
    for (std::size_t i = 0; i < j["stations"].size(); ++i) {
      out.push_back(rule_from(j["stations"][i], commodities, "/stations/" + std::to_string(i)));
    }
  } else if (j.is_object() && j.contains("rules")) {
    return rules_from_json(j["rules"], commodities);
  } else {
    out.push_back(rule_from(j, commodities, ""));
  }
  return out;
}

json solution_json(const PointSolution& s, const CommodityList& commodities) {
  json j;
  j["gamma"] = number_or_string(s.gamma);
  j["status"] = std::string(status_name(s.status));
  j["expected_imleo_kg"] = s.expected_J;
  j["expected_loss_days"] = s.expected_Z;
  j["imleo_kg"] = s.J;
  j["loss_days"] = s.Z;
  j["objective"] = s.objective;
  j["gap"] = s.gap;
  j["nodes"] = s.nodes;
  j["iterations"] = s.iterations;
  j["rows"] = s.rows;
  j["columns"] = s.columns;
  j["binaries"] = s.binaries;
  j["warnings"] = s.warnings;
  j["rules"] = rules_json(s.rules, commodities);
  return j;
}

json report_json(const EvaluationReport& r) {
  json j;
  j["expected_imleo_kg"] = r.expected_J;
  j["expected_loss_days"] = r.expected_Z;
  j["se_imleo_kg"] = r.se_J;
  j["se_loss_days"] = r.se_Z;
  json rows = json::array();
  for (const ScenarioOutcome& o : r.scenarios) rows.push_back({{"id", o.id}, {"imleo_kg", o.J}, {"loss_days", o.Z}});
  j["scenarios"] = rows;
  return j;
}

std::string pareto_csv(const std::vector<ParetoPoint>& points, const ArtifactMeta& meta) {
  std::ostringstream out;
  out << "# kind=" << meta.kind << "\n";
  out << "# seed=" << (meta.seed ? std::to_string(*meta.seed) : "") << "\n";
  if (meta.evaluation_seed) out << "# evaluation_seed=" << *meta.evaluation_seed << "\n";
  out << "# config_hash=" << meta.config_hash << "\n";
  for (const ParetoPoint& p : points) {
    if (!p.solved) out << "# failed gamma=" << format_number(p.gamma) << " error=" << p.error << "\n";
  }
  out << "# timestamp=" << meta.timestamp << "\n";
  out << "gamma,expected_imleo_kg,expected_loss_days,dominated\n";
  for (const ParetoPoint& p : points) {
    if (!p.solved) continue;
    out << format_number(p.gamma) << ',' << format_number(p.evaluation.expected_J) << ','
        << format_number(p.evaluation.expected_Z) << ',' << (p.dominated ? 1 : 0) << "\n";
  }
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorKind::kIoError, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIoError, "cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParseError, path.string() + ": " + e.what());
  }
}

}  // namespace flexplan
