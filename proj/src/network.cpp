#include "flexplan/network.hpp"

#include <cmath>

#include "flexplan/errors.hpp"

namespace flexplan {

CommodityList::CommodityList(std::vector<Commodity> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (entries_[i].id == entries_[j].id) {
        throw Error(ErrorKind::kConfigInvalid, "duplicate commodity id '" + entries_[i].id + "'",
                    "/commodities/" + std::to_string(i) + "/id");
      }
    }
  }
}

std::optional<int> CommodityList::find(std::string_view id) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].id == id) return static_cast<int>(i);
  }
  return std::nullopt;
}

int CommodityList::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw Error(ErrorKind::kMissingCommodity, "no commodity '" + std::string(id) + "'");
}

std::vector<int> CommodityList::rule_commodities() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].shortage_penalty > 0.0) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> TimeExpandedNetwork::stations() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_station) out.push_back(static_cast<int>(i));
  }
  return out;
}

int TimeExpandedNetwork::node_index(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return static_cast<int>(i);
  }
  throw Error(ErrorKind::kConfigInvalid, "unknown node '" + std::string(id) + "'");
}

double mass_ratio(double delta_v_km_s, double specific_impulse) {
  return std::exp(delta_v_km_s * 1000.0 / (kStandardGravity * specific_impulse));
}

Matrix build_transformation_matrix(const SpacecraftSpec* vehicle, double delta_v_km_s,
                                   int flight_time_days, const CommodityList& commodities,
                                   double consumable_rate_per_crew) {
  const std::size_t n = commodities.size();
  Matrix q = Matrix::identity(n);

  if (vehicle != nullptr && delta_v_km_s > 0.0) {
    if (vehicle->propellant_commodity < 0 ||
        static_cast<std::size_t>(vehicle->propellant_commodity) >= n) {
      throw Error(ErrorKind::kMissingCommodity,
                  "spacecraft '" + vehicle->name + "' has no propellant commodity");
    }
    const double mr = mass_ratio(delta_v_km_s, vehicle->specific_impulse);
    if ((mr - 1.0) * (vehicle->dry_mass + vehicle->payload_capacity) > vehicle->propellant_capacity) {
      throw Error(ErrorKind::kInfeasibleBurn,
                  "spacecraft '" + vehicle->name + "' cannot carry a full payload through " +
                      std::to_string(delta_v_km_s) + " km/s");
    }
    // Arriving propellant p' satisfies p = mr * (p' + rest), i.e.
    // p' = p / mr - (1 - 1/mr) * rest, where rest is dry + payload mass.
    const auto p = static_cast<std::size_t>(vehicle->propellant_commodity);
    const double burn = 1.0 - 1.0 / mr;
    q(p, p) = 1.0 / mr;
    for (std::size_t e = 0; e < n; ++e) {
      if (e == p) continue;
      const double m = static_cast<int>(e) == vehicle->count_commodity ? vehicle->dry_mass
                                                                       : commodities[e].unit_mass;
      if (m != 0.0) q(p, e) -= burn * m;
    }
  }

  if (flight_time_days > 0 && consumable_rate_per_crew > 0.0) {
    for (std::size_t c = 0; c < n; ++c) {
      if (commodities[c].role != CommodityRole::kCrewConsumable) continue;
      for (std::size_t e = 0; e < n; ++e) {
        if (commodities[e].role == CommodityRole::kCrew) {
          q(c, e) -= consumable_rate_per_crew * flight_time_days;
        }
      }
    }
  }
  return q;
}

Matrix build_concurrency_matrix(const SpacecraftSpec& vehicle, const CommodityList& commodities) {
  const std::size_t n = commodities.size();
  Matrix h(2, n);
  for (std::size_t e = 0; e < n; ++e) {
    const int ei = static_cast<int>(e);
    if (ei == vehicle.count_commodity) {
      h(0, e) = -vehicle.payload_capacity;
      h(1, e) = -vehicle.propellant_capacity;
    } else if (ei == vehicle.propellant_commodity) {
      h(1, e) = 1.0;
    } else {
      h(0, e) = commodities[e].unit_mass;
    }
  }
  return h;
}

CommodityList make_commodity_list(const CampaignConfig& config) {
  std::vector<Commodity> out;
  for (const CommodityConfig& c : config.commodities) {
    Commodity m{c.id, c.unit, c.consumption_rate, c.shortage_penalty, c.loss_weight, c.unit_mass, c.role};
    for (const SpacecraftConfig& s : config.spacecraft) {
      if (s.count_commodity == c.id) m.unit_mass = s.dry_mass;
    }
    out.push_back(std::move(m));
  }
  return CommodityList(std::move(out));
}

TimeExpandedNetwork build_network(const CampaignConfig& config) {
  TimeExpandedNetwork net;
  net.commodities = make_commodity_list(config);
  net.mission_end_day = config.mission_end_day;
  net.max_delay = config.delay_model.max_delay;
  net.horizon_days = config.mission_end_day + config.delay_model.max_delay + 1;

  for (const NodeConfig& n : config.nodes) {
    net.nodes.push_back({n.id, n.is_station, n.is_earth});
    if (n.is_earth) net.earth = static_cast<int>(net.nodes.size()) - 1;
  }
  if (net.earth < 0) throw Error(ErrorKind::kConfigInvalid, "no Earth node", "/nodes");
  if (config.launches.empty()) throw Error(ErrorKind::kConfigInvalid, "empty launch list", "/launches");

  for (const SpacecraftConfig& s : config.spacecraft) {
    SpacecraftSpec spec{s.name, s.dry_mass, s.propellant_capacity, s.payload_capacity,
                        s.specific_impulse, net.commodities.index_of(s.propellant_commodity),
                        net.commodities.index_of(s.count_commodity)};
    net.spacecraft.push_back(spec);
  }
  auto vehicle_index = [&](const std::string& name, const std::string& path) {
    if (name.empty()) return -1;
    for (std::size_t v = 0; v < net.spacecraft.size(); ++v) {
      if (net.spacecraft[v].name == name) return static_cast<int>(v);
    }
    throw Error(ErrorKind::kConfigInvalid, "unknown spacecraft '" + name + "'", path);
  };

  auto make_arc = [&](const RouteConfig& r, int vehicle, const std::string& path) {
    Arc a;
    a.kind = r.kind == RouteKind::kLaunch ? ArcKind::kLaunch : ArcKind::kTransit;
    a.vehicle = vehicle;
    a.origin = net.node_index(r.origin);
    a.destination = net.node_index(r.destination);
    a.flight_time = r.flight_time_days;
    a.delta_v = r.delta_v_km_s;
    const SpacecraftSpec* spec = vehicle >= 0 ? &net.spacecraft[static_cast<std::size_t>(vehicle)] : nullptr;
    try {
      a.Q = build_transformation_matrix(spec, a.delta_v, a.flight_time, net.commodities,
                                        config.crew_consumable_rate_per_crew);
    } catch (const Error& e) {
      throw Error(e.kind(), e.what(), path);
    }
    if (spec != nullptr) a.H = build_concurrency_matrix(*spec, net.commodities);
    a.cost.assign(net.commodities.size(), 0.0);
    if (a.kind == ArcKind::kLaunch) {
      for (std::size_t e = 0; e < net.commodities.size(); ++e) a.cost[e] = net.commodities[e].unit_mass;
    }
    return a;
  };

  for (std::size_t l = 0; l < config.launches.size(); ++l) {
    const LaunchConfig& launch = config.launches[l];
    const std::string path = "/launches/" + std::to_string(l);
    const RouteConfig* route = nullptr;
    for (const RouteConfig& r : config.routes) {
      if (r.kind == RouteKind::kLaunch && r.destination == launch.destination &&
          net.node_index(r.origin) == net.earth) {
        route = &r;
        break;
      }
    }
    if (route == nullptr) {
      throw Error(ErrorKind::kConfigInvalid, "no launch route to '" + launch.destination + "'", path);
    }
    const std::string& vname = launch.vehicle.empty() ? route->vehicle : launch.vehicle;
    Arc a = make_arc(*route, vehicle_index(vname, path + "/vehicle"), path);
    a.launch = static_cast<int>(l);
    a.crewed = launch.crewed;
    a.forbid_propellant_delivery = a.vehicle >= 0 && !launch.crewed &&
                                   config.return_propellant == ReturnPropellant::kCarryAlong;
    net.arcs.push_back(std::move(a));
  }
  for (std::size_t r = 0; r < config.routes.size(); ++r) {
    const RouteConfig& route = config.routes[r];
    if (route.kind != RouteKind::kTransit) continue;
    const std::string path = "/routes/" + std::to_string(r);
    net.arcs.push_back(make_arc(route, vehicle_index(route.vehicle, path + "/vehicle"), path));
  }
  return net;
}

}  // namespace flexplan
