#pragma once

#include <string>
#include <vector>

#include "flexplan/milp.hpp"
#include "flexplan/network.hpp"
#include "flexplan/scenario.hpp"

namespace flexplan {

// "Launch up to R_l of safety stock with launch l-1." R is indexed
// [launch][commodity] over the full commodity list; launches are the
// station's own launches in nominal order, and R[0] is always zero.
struct DecisionRuleSet {
  std::string station;
  std::vector<int> launches;  // global launch indices served by this station
  std::vector<std::vector<double>> R;

  bool operator==(const DecisionRuleSet&) const = default;
};

// Per launch l and commodity e. u[l] is the top-up shipped with launch l-1
// (u[0] = 0); r = u + b[l-1]; h is the weighted shortage in days; b is the
// stock left after launch l's delay.
struct SimulationTrace {
  std::vector<std::vector<double>> u, r, h, b;
  std::vector<std::vector<int>> alpha, beta;
  double Z = 0.0;
};

// Largest useful target: stock covering the maximum delay.
std::vector<double> coverage_ceiling(const CommodityList& commodities, double max_delay);

// Throws ZeroRateShortage when a penalized commodity has no consumption rate.
void check_rule_commodities(const CommodityList& commodities);

SimulationTrace simulate_rule(const DecisionRuleSet& rules, const std::vector<int>& station_delays,
                              const CommodityList& commodities);

// Delays of the rule's launches picked out of a full scenario.
std::vector<int> station_delays(const DecisionRuleSet& rules, const Scenario& scenario);

// Family constants per commodity.
struct BigM {
  std::vector<double> u;
  std::vector<double> b;
  std::vector<double> h;
  std::vector<double> day;
};

BigM big_m_bounds(const CommodityList& commodities, double max_delay);

enum class BigMFamily { kU, kH, kB, kDay };

// A row whose binary relaxes it by M. When the binary sits at its relaxing
// value the rest of the row must stay strictly inside M.
struct BigMRow {
  int row = -1;
  int binary = -1;
  double tight_value = 0.0;
  double m = 0.0;
  BigMFamily family = BigMFamily::kU;
  // m came from the row's own delay and the stock cap rather than the family
  // constant; such rows are valid by construction.
  bool proven = false;
};

struct RuleBlock {
  int station = -1;
  std::string station_id;
  std::vector<int> launches;     // global launch indices, nominal order
  std::vector<int> commodities;  // rule commodities
  // Column ids, -1 where the quantity is a constant. Indexed [l][c] for R
  // and [k][l][c] for the rest, c indexing `commodities`.
  std::vector<std::vector<int>> R;
  std::vector<std::vector<std::vector<int>>> u, h, b, alpha, beta;
  std::vector<BigMRow> big_m_rows;
};

struct RuleBlockOptions {
  // Weight on sum_k p_k sum_l c''^T h in the objective.
  double loss_weight = 1.0;
  // When set, R columns are fixed to these targets ([l][e], full length).
  const std::vector<std::vector<double>>* fixed_R = nullptr;
  // Use per-row constants where they beat the family constants.
  bool tighten = true;
};

// Stations' launches in nominal order. Throws TimelineGap when the station
// has none.
std::vector<int> station_launches(const CampaignConfig& config, const std::string& station);

RuleBlock build_rule_block(MilpProblem& problem, const TimeExpandedNetwork& network,
                           int station, const std::vector<int>& launches, const ScenarioSet& set,
                           const BigM& m, const RuleBlockOptions& options = {});

// Reads R out of a solved block, clamped at zero.
DecisionRuleSet extract_rules(const RuleBlock& block, const TimeExpandedNetwork& network,
                              const std::vector<double>& values);

// Largest relative use of M over the block's relaxed rows; values at or
// above 1 - 1e-6 / M mean the constant was too small.
struct BigMCheck {
  bool ok = true;
  BigMFamily worst_family = BigMFamily::kU;
  double worst_usage = 0.0;  // fraction of M used
};
BigMCheck check_big_m(const MilpProblem& problem, const RuleBlock& block, const std::vector<double>& values);

std::string_view to_string(BigMFamily family);

}  // namespace flexplan
