#pragma once

#include <string>
#include <vector>

#include "flexplan/config.hpp"
#include "flexplan/decision_rules.hpp"
#include "flexplan/logistics.hpp"
#include "flexplan/milp.hpp"
#include "flexplan/network.hpp"
#include "flexplan/scenario.hpp"

namespace flexplan {

// Everything derived from a config that does not depend on scenarios.
struct Campaign {
  CampaignConfig config;
  TimeExpandedNetwork network;
  LaunchTimeline timeline;
  DemandSchedule demands;
  std::vector<StationLaunches> stations;  // stations that receive launches
  TruncExpCdf delay;                      // shared distribution
  std::vector<TruncExpCdf> per_launch;    // empty when shared
  std::vector<std::string> warnings;
};

// Fits the delay rate when the config names a sample CSV (resolved against
// the config's directory).
Campaign make_campaign(const CampaignConfig& config);

ScenarioSet operating_scenarios(const Campaign& campaign, int count, std::uint64_t seed);
ScenarioSet evaluation_scenarios(const Campaign& campaign, int count, std::uint64_t seed);

struct OptimizeOptions {
  SolverOptions solver = [] {
    SolverOptions s;
    s.branching = BranchRule::kPenalty;
    return s;
  }();
  // Worker threads for independent solves (gamma points, scenarios).
  int threads = 1;
  // Doublings of a big-M family before giving up.
  int max_big_m_doublings = 6;
};

SolverOptions solver_options(const CampaignConfig& config);

struct AssembledProblem {
  MilpProblem problem;
  std::vector<RuleBlock> rules;  // one per station, order of Campaign::stations
  LogisticsBlock logistics;
};

struct AssembleOptions {
  double cost_weight = 1.0;
  double loss_weight = 0.0;
  // Lower bound on R_l for l >= 2 (the worst-case anchor pins it at the
  // coverage ceiling).
  bool pin_ceiling = false;
  // Fixed targets per station ([station][l][e]); empty means free.
  const std::vector<std::vector<std::vector<double>>>* fixed_R = nullptr;
};

AssembledProblem assemble(const Campaign& campaign, const ScenarioSet& operating, const BigM& m,
                          const AssembleOptions& options);

// Objective weights for a finite gamma: cost 1, loss gamma.
AssembledProblem assemble(double gamma, const Campaign& campaign, const ScenarioSet& operating);

BigM campaign_big_m(const Campaign& campaign);

struct PointSolution {
  double gamma = 0.0;
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<DecisionRuleSet> rules;
  // Optimizer's own expectation terms on the operating set.
  double expected_J = 0.0;
  double expected_Z = 0.0;
  std::vector<double> J, Z;  // per operating scenario
  double objective = 0.0;
  double gap = 0.0;
  long nodes = 0;
  long iterations = 0;
  std::size_t rows = 0, columns = 0, binaries = 0;
  std::vector<std::string> warnings;
};

// Solves one weighted point. gamma = infinity minimizes Z with R pinned at
// the ceiling, then minimizes J with Z held at its optimum. Failed big-M
// checks double the offending family and re-solve. Throws StatusInvalid when
// the solver returns no solution.
PointSolution solve_point(double gamma, const Campaign& campaign, const ScenarioSet& operating,
                          const OptimizeOptions& options = {});

struct ScenarioOutcome {
  int id = 0;
  double J = 0.0;
  double Z = 0.0;
};

struct EvaluationReport {
  double expected_J = 0.0;
  double expected_Z = 0.0;
  double se_J = 0.0;  // standard error of the mean
  double se_Z = 0.0;
  std::vector<ScenarioOutcome> scenarios;
};

// Per scenario: u and Z from the rule recursion, J from the scenario's
// logistics LP with u fixed. Throws ScenarioInfeasible naming the scenario.
EvaluationReport evaluate_rules(const std::vector<DecisionRuleSet>& rules, const ScenarioSet& evaluation,
                                const Campaign& campaign, const OptimizeOptions& options = {});

struct ParetoPoint {
  double gamma = 0.0;
  bool solved = false;
  std::string error;  // set when the point failed
  PointSolution solution;
  EvaluationReport evaluation;
  bool dominated = false;
};

// Points keep gamma order. Dominance is judged on the evaluation estimates.
std::vector<ParetoPoint> sweep_pareto(const Campaign& campaign, const std::vector<double>& gammas,
                                      const ScenarioSet& operating, const ScenarioSet& evaluation,
                                      const OptimizeOptions& options = {});

// A point is dominated when another has J and Z no worse and one strictly
// better; of identical points the later one is dominated.
void mark_dominated(std::vector<ParetoPoint>& points);
std::vector<ParetoPoint> non_dominated(const std::vector<ParetoPoint>& points);

}  // namespace flexplan
