#include "flexplan/logistics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "flexplan/errors.hpp"

namespace flexplan {
namespace {

const Arc& launch_arc(const TimeExpandedNetwork& network, int launch) {
  for (const Arc& a : network.arcs) {
    if (a.kind == ArcKind::kLaunch && a.launch == launch) return a;
  }
  throw Error(ErrorKind::kDanglingDemand, "no launch arc for launch " + std::to_string(launch + 1));
}

// Commodity rows of Q that can go negative need an explicit nonnegative
// arrival row; mass balance alone would let arcs offset each other.
bool has_sink(const Matrix& q, std::size_t e) {
  for (std::size_t f = 0; f < q.cols(); ++f) {
    if (q(e, f) < 0.0) return true;
  }
  return false;
}

}  // namespace

DemandSchedule make_demand_schedule(const CampaignConfig& config, const TimeExpandedNetwork& network) {
  DemandSchedule s;
  s.entries = config.demands;
  const CommodityList& com = network.commodities;
  s.earth_supply.assign(com.size(), 0.0);

  std::vector<bool> explicit_at_earth(com.size(), false);
  std::vector<double> total_demand(com.size(), 0.0);
  for (const DemandConfig& d : config.demands) {
    const auto e = com.find(d.commodity);
    if (!e) continue;
    if (d.node == network.nodes[static_cast<std::size_t>(network.earth)].id) explicit_at_earth[static_cast<std::size_t>(*e)] = true;
    if (d.amount < 0.0) total_demand[static_cast<std::size_t>(*e)] -= d.amount;
  }
  int vehicle_launches = 0;
  for (const Arc& a : network.arcs) {
    if (a.kind == ArcKind::kLaunch && a.vehicle >= 0) ++vehicle_launches;
  }
  for (std::size_t e = 0; e < com.size(); ++e) {
    if (explicit_at_earth[e]) continue;
    switch (com[e].role) {
      case CommodityRole::kPayload:
      case CommodityRole::kCrewConsumable:
        s.earth_supply[e] = config.earth_supply_factor * total_demand[e];
        break;
      case CommodityRole::kPropellant: {
        double cap = 0.0;
        for (const SpacecraftSpec& v : network.spacecraft) {
          if (v.propellant_commodity == static_cast<int>(e)) cap = std::max(cap, v.propellant_capacity);
        }
        s.earth_supply[e] = config.earth_supply_factor * cap * vehicle_launches;
        break;
      }
      case CommodityRole::kVehicle:
        s.earth_supply[e] = vehicle_launches;
        break;
      case CommodityRole::kCrew:
        break;
    }
  }
  return s;
}

std::vector<DemandEntry> realize_demands(const DemandSchedule& schedule, const TimeExpandedNetwork& network,
                                         const LaunchTimeline& timeline, const Scenario& scenario) {
  std::vector<DemandEntry> out;
  const CommodityList& com = network.commodities;
  for (std::size_t i = 0; i < schedule.entries.size(); ++i) {
    const DemandConfig& d = schedule.entries[i];
    const std::string path = "/demands/" + std::to_string(i);
    DemandEntry r;
    int node = -1;
    for (std::size_t n = 0; n < network.nodes.size(); ++n) {
      if (network.nodes[n].id == d.node) node = static_cast<int>(n);
    }
    const auto e = com.find(d.commodity);
    if (node < 0 || !e) {
      throw Error(ErrorKind::kDanglingDemand, "demand references unknown node or commodity", path);
    }
    r.node = node;
    r.commodity = *e;
    r.amount = d.amount;
    r.day = d.day;
    if (d.launch) {
      const int l = *d.launch;
      if (l < 0 || static_cast<std::size_t>(l) >= timeline.nominal.size()) {
        throw Error(ErrorKind::kDanglingDemand, "demand anchored to unknown launch", path);
      }
      const Arc& arc = launch_arc(network, l);
      if (arc.destination != node) {
        throw Error(ErrorKind::kDanglingDemand, "anchored demand is not at the launch destination", path);
      }
      const int delay = scenario.delays[static_cast<std::size_t>(l)];
      r.day = timeline.realized(scenario, static_cast<std::size_t>(l)) + arc.flight_time;
      const Commodity& c = com[static_cast<std::size_t>(r.commodity)];
      if (c.shortage_penalty > 0.0 && r.amount < 0.0) {
        r.launch = l;
        r.configured = r.amount;
        r.amount = -std::max(-r.amount - delay * c.consumption_rate, 0.0);
      }
    }
    if (r.day < 0 || r.day >= network.horizon_days) {
      throw Error(ErrorKind::kDanglingDemand, "demand day " + std::to_string(r.day) + " is off the horizon", path);
    }
    out.push_back(r);
  }
  for (std::size_t e = 0; e < schedule.earth_supply.size(); ++e) {
    if (schedule.earth_supply[e] > 0.0) out.push_back({network.earth, 0, static_cast<int>(e), schedule.earth_supply[e]});
  }
  return out;
}

LogisticsBlock build_logistics_block(MilpProblem& problem, const TimeExpandedNetwork& network,
                                     const ScenarioSet& set, const LaunchTimeline& timeline,
                                     const DemandSchedule& demands,
                                     const std::vector<InterfaceEntry>& interface,
                                     const std::vector<StationLaunches>& stations,
                                     const std::vector<ShortageEntry>& shortages,
                                     const LogisticsOptions& options) {
  const TimeWindows windows = build_time_windows(timeline, network, set);
  const CommodityList& com = network.commodities;
  const std::size_t E = com.size();
  const std::size_t N = network.nodes.size();
  const int last_day = network.horizon_days - 1;

  std::map<std::tuple<int, int, int>, const InterfaceEntry*> iface;
  for (const InterfaceEntry& entry : interface) iface[{entry.scenario, entry.station, entry.launch}] = &entry;
  std::map<std::pair<int, int>, const ShortageEntry*> short_of;
  for (const ShortageEntry& entry : shortages) short_of[{entry.scenario, entry.launch}] = &entry;

  LogisticsBlock block;
  block.first_row = problem.num_rows();
  const std::size_t first_col = problem.num_columns();
  block.cost_terms.resize(set.size());
  block.probabilities.resize(set.size());
  block.active_days.resize(set.size());

  for (std::size_t k = 0; k < set.size(); ++k) {
    const Scenario& s = set.scenarios[k];
    block.probabilities[k] = s.p;
    const std::string ks = "k" + std::to_string(s.id) + "_";
    const std::vector<DemandEntry> realized = realize_demands(demands, network, timeline, s);

    // Top-ups delivered to stations: (node, day) -> interface entry.
    std::vector<std::pair<std::pair<int, int>, const InterfaceEntry*>> topups;
    for (const StationLaunches& st : stations) {
      for (std::size_t l = 1; l < st.launches.size(); ++l) {
        const int carrier = st.launches[l - 1];
        auto it = iface.find({static_cast<int>(k), st.station, carrier});
        if (it == iface.end()) {
          throw Error(ErrorKind::kUnreservedInterface,
                      "no top-up columns for station '" + network.nodes[static_cast<std::size_t>(st.station)].id +
                          "' on launch " + std::to_string(carrier + 1) + " in scenario " + std::to_string(s.id));
        }
        const Arc& arc = launch_arc(network, carrier);
        topups.push_back({{st.station, windows.windows[k][static_cast<std::size_t>(&arc - network.arcs.data())] +
                                           arc.flight_time},
                          it->second});
      }
    }

    // Active days per node. Transit arcs leave only on days when something
    // arrives at their origin: between arrivals stock can only shrink, so a
    // later departure can always move back to the last arrival. Arrivals
    // are closed under transit.
    std::vector<std::set<int>> days(N), inflow(N);
    for (std::size_t a = 0; a < network.arcs.size(); ++a) {
      const Arc& arc = network.arcs[a];
      if (arc.kind != ArcKind::kLaunch) continue;
      const int w = windows.windows[k][a];
      days[static_cast<std::size_t>(arc.origin)].insert(w);
      days[static_cast<std::size_t>(arc.destination)].insert(w + arc.flight_time);
      inflow[static_cast<std::size_t>(arc.destination)].insert(w + arc.flight_time);
    }
    for (const DemandEntry& d : realized) {
      days[static_cast<std::size_t>(d.node)].insert(d.day);
      if (d.amount > 0.0) inflow[static_cast<std::size_t>(d.node)].insert(d.day);
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (const Arc& arc : network.arcs) {
        if (arc.kind != ArcKind::kTransit) continue;
        const auto o = static_cast<std::size_t>(arc.origin);
        const auto d = static_cast<std::size_t>(arc.destination);
        for (int t : std::vector<int>(inflow[o].begin(), inflow[o].end())) {
          if (t + arc.flight_time > last_day) continue;
          days[o].insert(t);
          days[d].insert(t + arc.flight_time);
          if (inflow[d].insert(t + arc.flight_time).second) changed = true;
        }
      }
    }
    std::vector<std::vector<int>> day_list(N);
    std::vector<std::map<int, std::size_t>> day_pos(N);
    for (std::size_t i = 0; i < N; ++i) {
      day_list[i].assign(days[i].begin(), days[i].end());
      for (std::size_t j = 0; j < day_list[i].size(); ++j) day_pos[i][day_list[i][j]] = j;
    }
    block.active_days[k] = day_list;

    // balance[node][day index][commodity] collects the row terms.
    std::vector<std::vector<std::vector<std::vector<Term>>>> balance(N);
    std::vector<std::vector<std::vector<double>>> rhs(N);
    for (std::size_t i = 0; i < N; ++i) {
      balance[i].assign(day_list[i].size(), std::vector<std::vector<Term>>(E));
      rhs[i].assign(day_list[i].size(), std::vector<double>(E, 0.0));
    }
    for (const DemandEntry& d : realized) {
      const auto i = static_cast<std::size_t>(d.node);
      const std::size_t j = day_pos[i].at(d.day);
      const auto e = static_cast<std::size_t>(d.commodity);
      auto sh = d.launch >= 0 ? short_of.find({static_cast<int>(k), d.launch}) : short_of.end();
      if (sh == short_of.end()) {
        rhs[i][j][e] += d.amount;
        continue;
      }
      const ShortageEntry& entry = *sh->second;
      rhs[i][j][e] += d.configured;
      if (entry.column.size() > e && entry.column[e] >= 0) {
        balance[i][j][e].push_back({entry.column[e], -entry.coefficient[e]});
      } else if (entry.value.size() > e) {
        rhs[i][j][e] += entry.value[e];
      }
    }
    for (const auto& [where, entry] : topups) {
      const auto i = static_cast<std::size_t>(where.first);
      const std::size_t j = day_pos[i].at(where.second);
      for (std::size_t e = 0; e < E; ++e) {
        if (entry->column.size() > e && entry->column[e] >= 0) {
          balance[i][j][e].push_back({entry->column[e], 1.0});
        } else if (entry->value.size() > e) {
          rhs[i][j][e] -= entry->value[e];
        }
      }
    }

    // One arc instance: departing columns, outflow and transformed inflow,
    // concurrency and arrival rows.
    auto add_flow = [&](const Arc& arc, const std::string& label, int depart, bool is_launch) {
      const auto o = static_cast<std::size_t>(arc.origin);
      const auto d = static_cast<std::size_t>(arc.destination);
      const int arrive = depart + arc.flight_time;
      std::vector<int> cols(E);
      for (std::size_t e = 0; e < E; ++e) {
        double lo = 0.0, hi = kInfinity;
        const Commodity& c = com[e];
        if (is_launch && arc.vehicle >= 0 &&
            static_cast<int>(e) == network.spacecraft[static_cast<std::size_t>(arc.vehicle)].count_commodity) {
          lo = hi = 1.0;  // every scheduled launch flies one vehicle
        }
        if (is_launch && c.role == CommodityRole::kCrew && !arc.crewed) hi = 0.0;
        const double cost = is_launch ? arc.cost[e] * s.p * options.cost_weight : 0.0;
        cols[e] = problem.add_continuous("x_" + ks + label + "_d" + std::to_string(depart) + "_" + c.id, lo, hi, cost);
        if (is_launch && arc.cost[e] != 0.0) block.cost_terms[k].push_back({cols[e], arc.cost[e]});
        balance[o][day_pos[o].at(depart)][e].push_back({cols[e], 1.0});
      }
      const std::size_t ja = day_pos[d].at(arrive);
      for (std::size_t e = 0; e < E; ++e) {
        std::vector<Term> arrival;
        for (std::size_t f = 0; f < E; ++f) {
          const double q = arc.Q(e, f);
          if (q == 0.0) continue;
          balance[d][ja][e].push_back({cols[f], -q});
          arrival.push_back({cols[f], q});
        }
        const bool forbid = arc.forbid_propellant_delivery && arc.vehicle >= 0 &&
                            static_cast<int>(e) == network.spacecraft[static_cast<std::size_t>(arc.vehicle)].propellant_commodity;
        if (forbid) {
          problem.add_row("arr_" + ks + label + "_d" + std::to_string(depart) + "_" + com[e].id, std::move(arrival),
                          RowSense::kEqual, 0.0);
        } else if (has_sink(arc.Q, e)) {
          problem.add_row("arr_" + ks + label + "_d" + std::to_string(depart) + "_" + com[e].id, std::move(arrival),
                          RowSense::kGreaterEqual, 0.0);
        }
      }
      for (std::size_t r = 0; r < arc.H.rows(); ++r) {
        std::vector<Term> terms;
        for (std::size_t e = 0; e < E; ++e) {
          if (arc.H(r, e) != 0.0) terms.push_back({cols[e], arc.H(r, e)});
        }
        problem.add_row("cap" + std::to_string(r) + "_" + ks + label + "_d" + std::to_string(depart), std::move(terms),
                        RowSense::kLessEqual, 0.0);
      }
    };

    for (std::size_t a = 0; a < network.arcs.size(); ++a) {
      const Arc& arc = network.arcs[a];
      const std::string label = arc.kind == ArcKind::kLaunch
                                    ? "L" + std::to_string(arc.launch + 1)
                                    : "T" + network.nodes[static_cast<std::size_t>(arc.origin)].id + "_" +
                                          network.nodes[static_cast<std::size_t>(arc.destination)].id;
      if (arc.kind == ArcKind::kLaunch) {
        add_flow(arc, label, windows.windows[k][a], true);
      } else {
        for (int t : inflow[static_cast<std::size_t>(arc.origin)]) {
          if (t + arc.flight_time <= last_day) add_flow(arc, label, t, false);
        }
      }
    }

    // Holdovers between consecutive active days.
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j + 1 < day_list[i].size(); ++j) {
        for (std::size_t e = 0; e < E; ++e) {
          const int col = problem.add_continuous("hold_" + ks + network.nodes[i].id + "_d" +
                                                 std::to_string(day_list[i][j]) + "_" + com[e].id);
          balance[i][j][e].push_back({col, 1.0});
          balance[i][j + 1][e].push_back({col, -1.0});
        }
      }
    }

    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < day_list[i].size(); ++j) {
        for (std::size_t e = 0; e < E; ++e) {
          auto& terms = balance[i][j][e];
          const double b = rhs[i][j][e];
          if (terms.empty() && b >= 0.0) continue;
          problem.add_row("mb_" + ks + network.nodes[i].id + "_d" + std::to_string(day_list[i][j]) + "_" + com[e].id,
                          std::move(terms), RowSense::kLessEqual, b);
        }
      }
    }
  }
  block.rows = problem.num_rows() - block.first_row;
  block.columns = problem.num_columns() - first_col;
  return block;
}

ImleoSummary extract_imleo(const SolveResult& result, const LogisticsBlock& block) {
  if (!result.has_solution()) {
    throw Error(ErrorKind::kStatusInvalid,
                "cannot read IMLEO from a " + std::string(status_name(result.status)) + " result");
  }
  ImleoSummary out;
  out.per_scenario.assign(block.cost_terms.size(), 0.0);
  for (std::size_t k = 0; k < block.cost_terms.size(); ++k) {
    double j = 0.0;
    for (const auto& [col, c] : block.cost_terms[k]) j += c * result.values[static_cast<std::size_t>(col)];
    out.per_scenario[k] = j;
    out.expected += block.probabilities[k] * j;
  }
  return out;
}

}  // namespace flexplan
