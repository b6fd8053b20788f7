#include "flexplan/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>
#include <omp.h>

#include "flexplan/errors.hpp"

namespace flexplan {
namespace {

// Runs body(i) for i in [0, n) on up to `threads` workers and rethrows the
// lowest-index failure, so errors do not depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, int threads, Body body) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, threads)) if (threads > 1)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

// Column terms of sum_k p_k sum_l c''^T h over all rule blocks.
std::vector<Term> loss_terms(const AssembledProblem& a, const Campaign& campaign, const ScenarioSet& set) {
  std::vector<Term> terms;
  for (const RuleBlock& rb : a.rules) {
    for (std::size_t k = 0; k < rb.h.size(); ++k) {
      for (std::size_t l = 0; l < rb.h[k].size(); ++l) {
        for (std::size_t c = 0; c < rb.commodities.size(); ++c) {
          const double w = campaign.network.commodities[static_cast<std::size_t>(rb.commodities[c])].loss_weight;
          terms.push_back({rb.h[k][l][c], set.scenarios[k].p * w});
        }
      }
    }
  }
  return terms;
}

// Indicator values the recursion assigns under the given targets, written
// over `base`.
std::vector<double> indicator_guess(const AssembledProblem& a, const Campaign& campaign, const ScenarioSet& set,
                                    std::vector<double> base, std::vector<DecisionRuleSet> rules) {
  for (std::size_t s = 0; s < a.rules.size(); ++s) {
    const RuleBlock& rb = a.rules[s];
    for (std::size_t l = 0; l < rb.R.size(); ++l) {
      for (std::size_t c = 0; c < rb.commodities.size(); ++c) {
        const Column& col = a.problem.column(rb.R[l][c]);
        double& v = rules[s].R[l][static_cast<std::size_t>(rb.commodities[c])];
        v = std::clamp(v, col.lower, col.upper);
      }
    }
    for (std::size_t k = 0; k < set.size(); ++k) {
      const SimulationTrace t = simulate_rule(rules[s], station_delays(rules[s], set.scenarios[k]),
                                              campaign.network.commodities);
      for (std::size_t l = 0; l < rb.R.size(); ++l) {
        for (std::size_t c = 0; c < rb.commodities.size(); ++c) {
          const auto e = static_cast<std::size_t>(rb.commodities[c]);
          if (rb.alpha[k][l][c] >= 0) base[static_cast<std::size_t>(rb.alpha[k][l][c])] = t.alpha[l][e];
          if (rb.beta[k][l][c] >= 0) base[static_cast<std::size_t>(rb.beta[k][l][c])] = t.beta[l][e];
        }
      }
    }
  }
  return base;
}

// Rule targets read off a relaxation determine every indicator through the
// recursion; proposing those gives branch and bound an early incumbent.
std::function<std::optional<std::vector<double>>(const std::vector<double>&)> recursion_heuristic(
    const AssembledProblem& a, const Campaign& campaign, const ScenarioSet& set) {
  return [&a, &campaign, &set](const std::vector<double>& x) -> std::optional<std::vector<double>> {
    std::vector<DecisionRuleSet> rules;
    for (const RuleBlock& rb : a.rules) rules.push_back(extract_rules(rb, campaign.network, x));
    return indicator_guess(a, campaign, set, x, std::move(rules));
  };
}

// Uniform fractions of the coverage ceiling, nothing stocked through full
// cover. Every one is feasible, so branching starts with an incumbent.
std::vector<std::vector<double>> ceiling_start_points(const AssembledProblem& a, const Campaign& campaign,
                                                      const ScenarioSet& set) {
  const std::vector<double> ceiling = coverage_ceiling(campaign.network.commodities, campaign.network.max_delay);
  std::vector<std::vector<double>> out;
  for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    std::vector<DecisionRuleSet> rules;
    for (const RuleBlock& rb : a.rules) {
      DecisionRuleSet r;
      r.station = rb.station_id;
      r.launches = rb.launches;
      r.R.assign(rb.R.size(), std::vector<double>(ceiling.size(), 0.0));
      for (std::size_t l = 1; l < rb.R.size(); ++l) {
        for (std::size_t e = 0; e < ceiling.size(); ++e) r.R[l][e] = f * ceiling[e];
      }
      rules.push_back(std::move(r));
    }
    out.push_back(indicator_guess(a, campaign, set, std::vector<double>(a.problem.num_columns(), 0.0),
                                  std::move(rules)));
  }
  return out;
}

void double_family(BigM& m, BigMFamily family) {
  std::vector<double>* v = family == BigMFamily::kU   ? &m.u
                           : family == BigMFamily::kB ? &m.b
                           : family == BigMFamily::kH ? &m.h
                                                      : &m.day;
  for (double& x : *v) x *= 2.0;
}

}  // namespace

Campaign make_campaign(const CampaignConfig& config) {
  Campaign c;
  c.config = config;
  c.network = build_network(config);
  for (const LaunchConfig& l : config.launches) c.timeline.nominal.push_back(l.nominal_day);
  c.demands = make_demand_schedule(config, c.network);
  for (std::size_t n = 0; n < config.nodes.size(); ++n) {
    if (!config.nodes[n].is_station) continue;
    bool any = false;
    for (const LaunchConfig& l : config.launches) any = any || l.destination == config.nodes[n].id;
    if (any) c.stations.push_back({static_cast<int>(n), station_launches(config, config.nodes[n].id)});
  }

  const DelayModelConfig& dm = config.delay_model;
  c.delay.max_delay = dm.max_delay;
  c.delay.point_mass_at_zero = dm.point_mass_at_zero;
  c.delay.lambda = dm.lambda;
  if (!dm.samples_csv.empty()) {
    std::filesystem::path p = dm.samples_csv;
    if (p.is_relative() && !config.source_path.empty()) p = config.source_path.parent_path() / p;
    const DelayFit fit = fit_delay_cdf(read_delay_csv(p), dm.max_delay);
    c.delay.lambda = fit.cdf.lambda;
    c.warnings.insert(c.warnings.end(), fit.warnings.begin(), fit.warnings.end());
  }
  for (double lambda : dm.per_launch_lambda) {
    TruncExpCdf f = c.delay;
    f.lambda = lambda;
    c.per_launch.push_back(f);
  }
  return c;
}

ScenarioSet operating_scenarios(const Campaign& campaign, int count, std::uint64_t seed) {
  return sample_scenario_set(campaign.delay, static_cast<int>(campaign.timeline.nominal.size()), count, seed,
                             ScenarioRole::kOperating, campaign.per_launch);
}

ScenarioSet evaluation_scenarios(const Campaign& campaign, int count, std::uint64_t seed) {
  return sample_scenario_set(campaign.delay, static_cast<int>(campaign.timeline.nominal.size()), count, seed,
                             ScenarioRole::kEvaluation, campaign.per_launch);
}

SolverOptions solver_options(const CampaignConfig& config) {
  SolverOptions s;
  s.time_limit_seconds = config.solver.time_limit_seconds;
  s.gap_limit = config.solver.gap_limit;
  s.max_nodes = config.solver.max_nodes;
  s.branching = BranchRule::kPenalty;
  return s;
}

BigM campaign_big_m(const Campaign& campaign) {
  BigM m = big_m_bounds(campaign.network.commodities, campaign.network.max_delay);
  const BigMOverrides& o = campaign.config.big_m;
  for (std::size_t e = 0; e < m.u.size(); ++e) {
    if (o.u) m.u[e] = m.b[e] = *o.u;
    if (o.h) m.h[e] = *o.h;
    if (o.day) m.day[e] = *o.day;
  }
  return m;
}

AssembledProblem assemble(const Campaign& campaign, const ScenarioSet& operating, const BigM& m,
                          const AssembleOptions& options) {
  validate_scenario_set(operating);
  const TimeExpandedNetwork& net = campaign.network;
  const std::size_t E = net.commodities.size();
  const std::vector<double> ceiling = coverage_ceiling(net.commodities, net.max_delay);
  AssembledProblem a;
  std::vector<InterfaceEntry> interface;
  std::vector<ShortageEntry> shortages;
  for (std::size_t s = 0; s < campaign.stations.size(); ++s) {
    const StationLaunches& st = campaign.stations[s];
    RuleBlockOptions ro;
    ro.loss_weight = options.loss_weight;
    if (options.fixed_R != nullptr) ro.fixed_R = &(*options.fixed_R)[s];
    RuleBlock rb = build_rule_block(a.problem, net, st.station, st.launches, operating, m, ro);
    if (options.pin_ceiling) {
      for (std::size_t l = 1; l < rb.R.size(); ++l) {
        for (std::size_t c = 0; c < rb.commodities.size(); ++c) {
          const double v = ceiling[static_cast<std::size_t>(rb.commodities[c])];
          a.problem.set_bounds(rb.R[l][c], v, v);
        }
      }
    }
    for (std::size_t k = 0; k < operating.size(); ++k) {
      for (std::size_t l = 0; l < st.launches.size(); ++l) {
        ShortageEntry sh{static_cast<int>(k), st.launches[l], std::vector<int>(E, -1), std::vector<double>(E, 0.0),
                         std::vector<double>(E, 0.0)};
        for (std::size_t c = 0; c < rb.commodities.size(); ++c) {
          const auto e = static_cast<std::size_t>(rb.commodities[c]);
          const Commodity& com = net.commodities[e];
          sh.column[e] = rb.h[k][l][c];
          sh.coefficient[e] = com.consumption_rate / com.shortage_penalty;
        }
        shortages.push_back(std::move(sh));
        if (l == 0) continue;
        InterfaceEntry in{static_cast<int>(k), st.station, st.launches[l - 1], std::vector<int>(E, -1),
                          std::vector<double>(E, 0.0)};
        for (std::size_t c = 0; c < rb.commodities.size(); ++c) {
          in.column[static_cast<std::size_t>(rb.commodities[c])] = rb.u[k][l][c];
        }
        interface.push_back(std::move(in));
      }
    }
    a.rules.push_back(std::move(rb));
  }
  LogisticsOptions lo;
  lo.cost_weight = options.cost_weight;
  a.logistics = build_logistics_block(a.problem, net, operating, campaign.timeline, campaign.demands, interface,
                                      campaign.stations, shortages, lo);
  return a;
}

AssembledProblem assemble(double gamma, const Campaign& campaign, const ScenarioSet& operating) {
  AssembleOptions o;
  o.loss_weight = gamma;
  return assemble(campaign, operating, campaign_big_m(campaign), o);
}

PointSolution solve_point(double gamma, const Campaign& campaign, const ScenarioSet& operating,
                          const OptimizeOptions& options) {
  if (!(gamma >= 0.0)) throw Error(ErrorKind::kValidationError, "gamma must be nonnegative");
  const bool worst_case = std::isinf(gamma);
  BigM m = campaign_big_m(campaign);
  PointSolution out;
  out.gamma = gamma;

  for (int attempt = 0;; ++attempt) {
    AssembleOptions ao;
    ao.cost_weight = worst_case ? 0.0 : 1.0;
    ao.loss_weight = worst_case ? 1.0 : gamma;
    ao.pin_ceiling = worst_case;
    AssembledProblem a = assemble(campaign, operating, m, ao);
    SolverOptions so = options.solver;
    so.heuristic = recursion_heuristic(a, campaign, operating);
    so.start_points = ceiling_start_points(a, campaign, operating);
    SolveResult res = solve_milp(a.problem, so);
    out.nodes += res.nodes;
    out.iterations += res.iterations;
    out.warnings.insert(out.warnings.end(), res.warnings.begin(), res.warnings.end());

    if (worst_case && res.has_solution()) {
      // Second stage: cheapest plan that keeps the minimal loss.
      const double z_star = res.objective;
      AssembleOptions cost_stage = ao;
      cost_stage.cost_weight = 1.0;
      cost_stage.loss_weight = 0.0;
      a = assemble(campaign, operating, m, cost_stage);
      a.problem.add_row("loss_cap", loss_terms(a, campaign, operating), RowSense::kLessEqual,
                        z_star + 1e-6 * std::max(1.0, std::abs(z_star)));
      so.heuristic = recursion_heuristic(a, campaign, operating);
      so.start_points = ceiling_start_points(a, campaign, operating);
      res = solve_milp(a.problem, so);
      out.nodes += res.nodes;
      out.iterations += res.iterations;
      out.warnings.insert(out.warnings.end(), res.warnings.begin(), res.warnings.end());
    }
    if (!res.has_solution()) {
      throw Error(ErrorKind::kStatusInvalid, "gamma " + std::to_string(gamma) + ": solver returned " +
                                                 std::string(status_name(res.status)));
    }

    bool ok = true;
    for (const RuleBlock& rb : a.rules) {
      const BigMCheck check = check_big_m(a.problem, rb, res.values);
      if (check.ok) continue;
      ok = false;
      if (attempt >= options.max_big_m_doublings) {
        throw Error(ErrorKind::kStatusInvalid,
                    "big-M family " + std::string(to_string(check.worst_family)) + " still binding after " +
                        std::to_string(attempt) + " doublings");
      }
      out.warnings.push_back("big-M family " + std::string(to_string(check.worst_family)) +
                             " was binding at station " + rb.station_id + "; doubled and re-solved");
      double_family(m, check.worst_family);
      break;
    }
    if (!ok) continue;

    out.status = res.status;
    out.objective = res.objective;
    out.gap = res.gap;
    out.rows = a.problem.num_rows();
    out.columns = a.problem.num_columns();
    out.binaries = a.problem.num_binaries();
    for (const RuleBlock& rb : a.rules) out.rules.push_back(extract_rules(rb, campaign.network, res.values));
    const ImleoSummary imleo = extract_imleo(res, a.logistics);
    out.J = imleo.per_scenario;
    out.expected_J = imleo.expected;
    out.Z.assign(operating.size(), 0.0);
    for (const RuleBlock& rb : a.rules) {
      for (std::size_t k = 0; k < rb.h.size(); ++k) {
        for (std::size_t l = 0; l < rb.h[k].size(); ++l) {
          for (std::size_t c = 0; c < rb.commodities.size(); ++c) {
            const double w = campaign.network.commodities[static_cast<std::size_t>(rb.commodities[c])].loss_weight;
            out.Z[k] += w * res.value(rb.h[k][l][c]);
          }
        }
      }
    }
    out.expected_Z = 0.0;
    for (std::size_t k = 0; k < operating.size(); ++k) out.expected_Z += operating.scenarios[k].p * out.Z[k];
    return out;
  }
}

EvaluationReport evaluate_rules(const std::vector<DecisionRuleSet>& rules, const ScenarioSet& evaluation,
                                const Campaign& campaign, const OptimizeOptions& options) {
  validate_scenario_set(evaluation);
  const TimeExpandedNetwork& net = campaign.network;
  const std::size_t E = net.commodities.size();
  if (rules.size() != campaign.stations.size()) {
    throw Error(ErrorKind::kValidationError, "expected rules for " + std::to_string(campaign.stations.size()) +
                                                 " stations, got " + std::to_string(rules.size()));
  }
  for (std::size_t s = 0; s < rules.size(); ++s) {
    const StationLaunches& st = campaign.stations[s];
    if (rules[s].station != net.nodes[static_cast<std::size_t>(st.station)].id || rules[s].launches != st.launches) {
      throw Error(ErrorKind::kValidationError, "rule set " + std::to_string(s) + " does not match station '" +
                                                   net.nodes[static_cast<std::size_t>(st.station)].id + "'");
    }
    if (rules[s].R.size() != st.launches.size()) {
      throw Error(ErrorKind::kValidationError, "rule set for '" + rules[s].station + "' has the wrong launch count");
    }
    for (const auto& row : rules[s].R) {
      if (row.size() != E) throw Error(ErrorKind::kValidationError, "rule targets must cover every commodity");
      for (double v : row) {
        if (!(v >= 0.0)) throw Error(ErrorKind::kValidationError, "rule targets must be nonnegative");
      }
    }
  }

  EvaluationReport report;
  report.scenarios.resize(evaluation.size());
  parallel_for(evaluation.size(), options.threads, [&](std::size_t k) {
    Scenario s = evaluation.scenarios[k];
    s.p = 1.0;
    ScenarioSet single;
    single.scenarios = {s};
    single.seed = evaluation.seed;
    single.role = evaluation.role;

    double z = 0.0;
    std::vector<InterfaceEntry> interface;
    std::vector<ShortageEntry> shortages;
    for (std::size_t st = 0; st < rules.size(); ++st) {
      const DecisionRuleSet& r = rules[st];
      const SimulationTrace trace = simulate_rule(r, station_delays(r, s), net.commodities);
      z += trace.Z;
      for (std::size_t l = 0; l < r.launches.size(); ++l) {
        ShortageEntry sh{0, r.launches[l], {}, {}, std::vector<double>(E, 0.0)};
        for (std::size_t e = 0; e < E; ++e) {
          const Commodity& c = net.commodities[e];
          if (c.shortage_penalty > 0.0) sh.value[e] = trace.h[l][e] * c.consumption_rate / c.shortage_penalty;
        }
        shortages.push_back(std::move(sh));
        if (l == 0) continue;
        interface.push_back({0, campaign.stations[st].station, r.launches[l - 1], {}, trace.u[l]});
      }
    }
    MilpProblem problem;
    const LogisticsBlock block = build_logistics_block(problem, net, single, campaign.timeline, campaign.demands,
                                                       interface, campaign.stations, shortages);
    const SolveResult res = solve_lp(problem, options.solver);
    if (res.status != SolveStatus::kOptimal) {
      throw Error(ErrorKind::kScenarioInfeasible, "scenario " + std::to_string(s.id) + ": logistics LP is " +
                                                      std::string(status_name(res.status)));
    }
    report.scenarios[k] = {s.id, extract_imleo(res, block).expected, z};
  });

  std::vector<double> J, Z;
  for (std::size_t k = 0; k < evaluation.size(); ++k) {
    const double p = evaluation.scenarios[k].p;
    report.expected_J += p * report.scenarios[k].J;
    report.expected_Z += p * report.scenarios[k].Z;
    J.push_back(report.scenarios[k].J);
    Z.push_back(report.scenarios[k].Z);
  }
  report.se_J = standard_error(J);
  report.se_Z = standard_error(Z);
  return report;
}

std::vector<ParetoPoint> sweep_pareto(const Campaign& campaign, const std::vector<double>& gammas,
                                      const ScenarioSet& operating, const ScenarioSet& evaluation,
                                      const OptimizeOptions& options) {
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] >= 0.0) || (i > 0 && !(gammas[i] > gammas[i - 1]))) {
      throw Error(ErrorKind::kValidationError, "gammas must be nonnegative and strictly increasing");
    }
  }
  if (operating.launches() != evaluation.launches()) {
    throw Error(ErrorKind::kValidationError, "operating and evaluation sets have different launch counts");
  }
  std::vector<ParetoPoint> points(gammas.size());
  // Points run concurrently; each point's own work stays serial.
  OptimizeOptions inner = options;
  inner.threads = gammas.size() > 1 ? 1 : options.threads;
  parallel_for(gammas.size(), options.threads, [&](std::size_t i) {
    ParetoPoint& p = points[i];
    p.gamma = gammas[i];
    try {
      p.solution = solve_point(gammas[i], campaign, operating, inner);
      p.evaluation = evaluate_rules(p.solution.rules, evaluation, campaign, inner);
      p.solved = true;
    } catch (const Error& e) {
      p.error = e.what();
    }
  });
  mark_dominated(points);
  return points;
}

void mark_dominated(std::vector<ParetoPoint>& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    ParetoPoint& p = points[i];
    p.dominated = false;
    if (!p.solved) continue;
    const double J = p.evaluation.expected_J, Z = p.evaluation.expected_Z;
    for (std::size_t j = 0; j < points.size() && !p.dominated; ++j) {
      const ParetoPoint& q = points[j];
      if (j == i || !q.solved) continue;
      const double qJ = q.evaluation.expected_J, qZ = q.evaluation.expected_Z;
      if (qJ > J || qZ > Z) continue;
      p.dominated = qJ < J || qZ < Z || j < i;
    }
  }
}

std::vector<ParetoPoint> non_dominated(const std::vector<ParetoPoint>& points) {
  std::vector<ParetoPoint> copy = points;
  mark_dominated(copy);
  std::vector<ParetoPoint> out;
  for (const ParetoPoint& p : copy) {
    if (p.solved && !p.dominated) out.push_back(p);
  }
  return out;
}

}  // namespace flexplan
