#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "flexplan/decision_rules.hpp"
#include "flexplan/optimizer.hpp"
#include "flexplan/scenario.hpp"

namespace flexplan {

// Provenance stamped on every artifact. Only `timestamp` varies between
// identical runs; it lives in its own field so comparisons can drop it.
struct ArtifactMeta {
  std::string kind;  // "scenarios", "rules", "pareto", ...
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> evaluation_seed;
  std::string config_hash;
  std::string config_path;
  std::string input_hash;  // for artifacts derived from a data file
  std::string timestamp;
};

// UTC ISO-8601 now, or FLEXPLAN_TIMESTAMP when that is set.
std::string current_timestamp();

std::string hash_text(std::string_view text);
std::string hash_file(const std::filesystem::path& path);

nlohmann::json meta_json(const ArtifactMeta& meta);
ArtifactMeta meta_from_json(const nlohmann::json& j);

// "inf" for infinity, shortest round-trip decimal otherwise.
std::string format_number(double v);
double parse_gamma(std::string_view text);
std::vector<double> parse_gamma_list(std::string_view text);

// Bare array of {id, delays, p}.
nlohmann::json scenarios_json(const ScenarioSet& set);
// Accepts the bare array or an object with a "scenarios" member.
ScenarioSet scenarios_from_json(const nlohmann::json& j, ScenarioRole role = ScenarioRole::kEvaluation);
// Writes the array and a `<path>.meta.json` sidecar.
void write_scenarios(const std::filesystem::path& path, const ScenarioSet& set, const ArtifactMeta& meta);
ScenarioSet read_scenarios(const std::filesystem::path& path, ScenarioRole role = ScenarioRole::kEvaluation);

// {station, launches:[{l, launch, R:{commodity: kg}}]}; several stations go
// under "stations".
nlohmann::json rules_json(const std::vector<DecisionRuleSet>& rules, const CommodityList& commodities);
std::vector<DecisionRuleSet> rules_from_json(const nlohmann::json& j, const CommodityList& commodities);

nlohmann::json solution_json(const PointSolution& s, const CommodityList& commodities);
nlohmann::json report_json(const EvaluationReport& r);

// `# key=value` header lines, then gamma,expected_imleo_kg,expected_loss_days,dominated.
std::string pareto_csv(const std::vector<ParetoPoint>& points, const ArtifactMeta& meta);

// Pretty JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace flexplan
