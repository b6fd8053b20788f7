#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flexplan/config.hpp"
#include "flexplan/matrix.hpp"

namespace flexplan {

inline constexpr double kStandardGravity = 9.80665;  // m/s^2

struct Commodity {
  std::string id;
  CommodityUnit unit = CommodityUnit::kKg;
  double consumption_rate = 0.0;
  double shortage_penalty = 0.0;
  double loss_weight = 1.0;
  double unit_mass = 1.0;
  CommodityRole role = CommodityRole::kPayload;
};

// Ordered commodity list; position defines the vector index.
class CommodityList {
 public:
  CommodityList() = default;
  explicit CommodityList(std::vector<Commodity> entries);

  std::size_t size() const { return entries_.size(); }
  const Commodity& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<Commodity>& entries() const { return entries_; }
  std::optional<int> find(std::string_view id) const;
  // Throws MissingCommodity.
  int index_of(std::string_view id) const;
  // Commodities whose shortage enters the loss: psi > 0.
  std::vector<int> rule_commodities() const;

 private:
  std::vector<Commodity> entries_;
};

struct SpacecraftSpec {
  std::string name;
  double dry_mass = 0.0;
  double propellant_capacity = 0.0;
  double payload_capacity = 0.0;
  double specific_impulse = 0.0;
  int propellant_commodity = -1;
  int count_commodity = -1;
};

struct Node {
  std::string id;
  bool is_station = false;
  bool is_earth = false;
};

enum class ArcKind { kLaunch, kTransit };

// A route family. Launch arcs exist only at their launch's realized day;
// transit arcs may depart on any day; holdovers are implicit at every node.
struct Arc {
  ArcKind kind = ArcKind::kLaunch;
  int vehicle = -1;  // index into spacecraft, -1 when no vehicle is modelled
  int origin = 0;
  int destination = 0;
  int flight_time = 0;
  double delta_v = 0.0;
  Matrix Q;
  Matrix H;
  std::vector<double> cost;
  int launch = -1;  // launch index for launch arcs
  bool crewed = false;
  // Cargo flights in carry-along mode may not deliver propellant.
  bool forbid_propellant_delivery = false;
};

struct TimeExpandedNetwork {
  CommodityList commodities;
  std::vector<Node> nodes;
  std::vector<SpacecraftSpec> spacecraft;
  std::vector<Arc> arcs;
  int horizon_days = 0;  // day grid is 0 .. horizon_days - 1
  int mission_end_day = 0;
  int max_delay = 90;
  int earth = -1;

  std::vector<int> stations() const;
  int node_index(std::string_view id) const;
};

// exp(dv / (g0 * isp)) with dv in km/s.
double mass_ratio(double delta_v_km_s, double specific_impulse);

// Q such that Q x is the arriving vector for departing vector x. Propellant
// pays the burn for the whole arriving stack; consumables are drawn down by
// crew count times `consumable_rate_per_crew` times the flight time.
Matrix build_transformation_matrix(const SpacecraftSpec* vehicle, double delta_v_km_s,
                                   int flight_time_days, const CommodityList& commodities,
                                   double consumable_rate_per_crew = 0.0);

// Rows: payload mass minus payload capacity per vehicle, propellant minus
// propellant capacity per vehicle.
Matrix build_concurrency_matrix(const SpacecraftSpec& vehicle, const CommodityList& commodities);

TimeExpandedNetwork build_network(const CampaignConfig& config);

CommodityList make_commodity_list(const CampaignConfig& config);

}  // namespace flexplan
