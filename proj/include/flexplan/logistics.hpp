#pragma once

#include <vector>

#include "flexplan/config.hpp"
#include "flexplan/milp.hpp"
#include "flexplan/network.hpp"
#include "flexplan/scenario.hpp"

namespace flexplan {

// One realized demand or supply (negative = demand).
struct DemandEntry {
  int node = 0;
  int day = 0;
  int commodity = 0;
  double amount = 0.0;
  // Launch-anchored entries of penalized commodities: the launch and the
  // configured amount before the delay reduction.
  int launch = -1;
  double configured = 0.0;
};

// The campaign's demand schedule as configured, before scenario shifts.
struct DemandSchedule {
  std::vector<DemandConfig> entries;
  // Earth supply placed on day 0 for every commodity that is not listed
  // explicitly at Earth.
  std::vector<double> earth_supply;
};

DemandSchedule make_demand_schedule(const CampaignConfig& config, const TimeExpandedNetwork& network);

// Demands of one scenario. Launch-anchored entries move to the realized
// arrival of their launch. For penalized commodities the anchored demand
// shrinks by the consumption that did not happen during the delay; with no
// stock on hand that is the whole delay times the rate.
std::vector<DemandEntry> realize_demands(const DemandSchedule& schedule, const TimeExpandedNetwork& network,
                                         const LaunchTimeline& timeline, const Scenario& scenario);

// Additional supply u delivered to `station` with launch `launch` in
// scenario `scenario` (an index into the set). Each commodity is either a
// column (column[e] >= 0) or the constant value[e].
struct InterfaceEntry {
  int scenario = 0;
  int station = 0;
  int launch = 0;
  std::vector<int> column;
  std::vector<double> value;
};

// Consumption (kg) skipped for lack of stock while launch `launch` was late.
// It replaces the no-stock reduction of that launch's anchored demands.
// Each commodity is either coefficient[e] * column[e] or the constant value[e].
struct ShortageEntry {
  int scenario = 0;
  int launch = 0;
  std::vector<int> column;
  std::vector<double> coefficient;
  std::vector<double> value;
};

// Launches serving a rule-managed station, in nominal order.
struct StationLaunches {
  int station = 0;
  std::vector<int> launches;
};

struct LogisticsBlock {
  // [k] -> (column, cost coefficient) of launch-arc flows; J_k is their sum.
  std::vector<std::vector<std::pair<int, double>>> cost_terms;
  std::vector<double> probabilities;
  // Active day grid per scenario and node after compression.
  std::vector<std::vector<std::vector<int>>> active_days;
  std::size_t first_row = 0;
  std::size_t rows = 0;
  std::size_t columns = 0;
};

struct LogisticsOptions {
  // Multiplies the p_k c^T x objective terms.
  double cost_weight = 1.0;
};

// Emits mass balance, concurrency and arrival rows for every scenario.
// Launch arcs get columns only on their realized day; other days are
// compressed to the days on which something happens and transit arcs leave
// only on days with an arrival at their origin. Both are exact because
// holdovers are lossless and free. Throws UnreservedInterface when a
// station launch that carries top-ups lacks an interface entry, and
// DanglingDemand for demands off the network.
LogisticsBlock build_logistics_block(MilpProblem& problem, const TimeExpandedNetwork& network,
                                     const ScenarioSet& set, const LaunchTimeline& timeline,
                                     const DemandSchedule& demands,
                                     const std::vector<InterfaceEntry>& interface,
                                     const std::vector<StationLaunches>& stations,
                                     const std::vector<ShortageEntry>& shortages = {},
                                     const LogisticsOptions& options = {});

struct ImleoSummary {
  std::vector<double> per_scenario;
  double expected = 0.0;
};

// Throws StatusInvalid unless the result carries a solution.
ImleoSummary extract_imleo(const SolveResult& result, const LogisticsBlock& block);

}  // namespace flexplan
