#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace flexplan {

enum class CommodityUnit { kKg, kCount };
enum class CommodityRole { kPayload, kPropellant, kVehicle, kCrew, kCrewConsumable };

struct CommodityConfig {
  std::string id;
  CommodityUnit unit = CommodityUnit::kKg;
  double consumption_rate = 0.0;  // eta, kg/day
  double shortage_penalty = 0.0;  // psi, day of loss per day of shortage
  double loss_weight = 1.0;       // c''
  // Launch mass per unit; 1 for kg commodities. For the vehicle count it is
  // replaced by the spacecraft dry mass.
  double unit_mass = 1.0;
  CommodityRole role = CommodityRole::kPayload;
};

struct NodeConfig {
  std::string id;
  bool is_station = false;
  bool is_earth = false;
};

struct SpacecraftConfig {
  std::string name;
  double dry_mass = 0.0;
  double propellant_capacity = 0.0;
  double payload_capacity = 0.0;
  double specific_impulse = 0.0;
  std::string propellant_commodity;
  std::string count_commodity;
};

enum class RouteKind { kLaunch, kTransit };

struct RouteConfig {
  std::string origin;
  std::string destination;
  int flight_time_days = 0;
  double delta_v_km_s = 0.0;
  RouteKind kind = RouteKind::kLaunch;
  std::string vehicle;  // empty: no spacecraft modelled on this route
};

struct LaunchConfig {
  int nominal_day = 0;
  std::string destination;
  std::string vehicle;  // empty for vehicle-free toy networks
  bool crewed = false;
};

struct DemandConfig {
  std::string node;
  std::string commodity;
  int day = 0;
  double amount = 0.0;        // negative = demand, positive = supply
  std::optional<int> launch;  // 0-based launch index this demand rides on
};

struct DelayModelConfig {
  double lambda = 0.05;
  int max_delay = 90;
  bool point_mass_at_zero = false;
  std::string samples_csv;               // when set, lambda is fitted from it
  std::vector<double> per_launch_lambda; // empty = shared distribution
};

struct ScenarioCountConfig {
  int operating = 8;
  int evaluation = 32;
  std::uint64_t operating_seed = 1;
  std::uint64_t evaluation_seed = 2;
};

struct SolverConfig {
  double time_limit_seconds = 600.0;
  double gap_limit = 1e-6;
  long max_nodes = 200000;
  int threads = 1;
};

struct BigMOverrides {
  std::optional<double> u;
  std::optional<double> h;
  std::optional<double> day;
};

enum class ReturnPropellant { kCarryAlong, kPrepositioned };

struct CampaignConfig {
  std::string name;
  int time_step_days = 1;
  int mission_end_day = 0;
  std::vector<CommodityConfig> commodities;
  double crew_consumable_rate_per_crew = 0.0;  // kg/day per crew member
  std::vector<NodeConfig> nodes;
  std::vector<SpacecraftConfig> spacecraft;
  std::vector<RouteConfig> routes;
  std::vector<LaunchConfig> launches;
  std::vector<DemandConfig> demands;
  double earth_supply_factor = 10.0;
  ReturnPropellant return_propellant = ReturnPropellant::kCarryAlong;
  DelayModelConfig delay_model;
  ScenarioCountConfig scenarios;
  // Strictly increasing; infinity marks the worst-case anchor.
  std::vector<double> gammas;
  SolverConfig solver;
  BigMOverrides big_m;

  // Where the config was read from; relative paths resolve against it.
  std::filesystem::path source_path;
};

std::string_view to_string(CommodityRole role);
std::string_view to_string(CommodityUnit unit);

// Parses and validates; throws ParseError / ValidationError with a JSON
// pointer to the offending field.
CampaignConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& source = {});
CampaignConfig load_config(const std::filesystem::path& path);

// Every field with defaults materialized. Loading the result reproduces the
// same config.
nlohmann::json resolved_config_json(const CampaignConfig& config);

// FNV-1a over the canonical resolved JSON, as 16 hex digits.
std::string config_hash(const CampaignConfig& config);

// Cargo-only campaign with `launches` quarterly launches and no crew flow,
// for horizon studies.
CampaignConfig make_cargo_only_config(int launches);

int commodity_index(const CampaignConfig& config, std::string_view id);
int node_index(const CampaignConfig& config, std::string_view id);

}  // namespace flexplan
