#include "flexplan/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "flexplan/errors.hpp"

namespace flexplan {
namespace {

using nlohmann::json;

// Walks one JSON object, tracking the pointer for error messages and
// rejecting keys nobody asked for. Keys starting with '_' are comments.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("expected an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : node_.items()) {
      if (!key.empty() && key[0] == '_') continue;
      if (!seen_.contains(key)) throw Error(ErrorKind::kValidationError, "unknown field", path_ + "/" + key);
    }
  }

  bool has(const std::string& key) const { return node_.contains(key) && !node_.at(key).is_null(); }
  std::string at(const std::string& key) const { return path_ + "/" + key; }
  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!node_.contains(key)) throw Error(ErrorKind::kValidationError, "missing required field", at(key));
    return node_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw Error(ErrorKind::kValidationError, "expected a number", at(key));
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    return has(key) ? number(key) : fallback;
  }
  long integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw Error(ErrorKind::kValidationError, "expected an integer", at(key));
    return v.get<long>();
  }
  long integer(const std::string& key, long fallback) {
    seen_.insert(key);
    return has(key) ? integer(key) : fallback;
  }
  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_unsigned()) throw Error(ErrorKind::kValidationError, "expected a nonnegative integer", at(key));
    return v.get<std::uint64_t>();
  }
  bool boolean(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) throw Error(ErrorKind::kValidationError, "expected a boolean", at(key));
    return v.get<bool>();
  }
  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw Error(ErrorKind::kValidationError, "expected a string", at(key));
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    return has(key) ? string(key) : fallback;
  }
  const json& array(const std::string& key, bool required = true) {
    static const json kEmpty = json::array();
    seen_.insert(key);
    if (!has(key)) {
      if (required) throw Error(ErrorKind::kValidationError, "missing required field", at(key));
      return kEmpty;
    }
    const json& v = node_.at(key);
    if (!v.is_array()) throw Error(ErrorKind::kValidationError, "expected an array", at(key));
    return v;
  }
  const json* object(const std::string& key) {
    seen_.insert(key);
    return has(key) ? &node_.at(key) : nullptr;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorKind::kValidationError, message, path_);
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& message, const std::string& path) {
  if (!ok) throw Error(ErrorKind::kValidationError, message, path);
}

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  }
  return true;
}

CommodityRole parse_role(const std::string& s, const std::string& path) {
  if (s == "payload") return CommodityRole::kPayload;
  if (s == "propellant") return CommodityRole::kPropellant;
  if (s == "vehicle") return CommodityRole::kVehicle;
  if (s == "crew") return CommodityRole::kCrew;
  if (s == "crew_consumable") return CommodityRole::kCrewConsumable;
  throw Error(ErrorKind::kValidationError, "unknown role '" + s + "'", path);
}

CommodityUnit parse_unit(const std::string& s, const std::string& path) {
  if (s == "kg") return CommodityUnit::kKg;
  if (s == "count") return CommodityUnit::kCount;
  throw Error(ErrorKind::kValidationError, "unknown unit '" + s + "'", path);
}

double parse_gamma(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "Infinity") return std::numeric_limits<double>::infinity();
  }
  throw Error(ErrorKind::kValidationError, "gamma must be a number or \"inf\"", path);
}

json gamma_json(double g) { return std::isinf(g) ? json("inf") : json(g); }

}  // namespace

std::string_view to_string(CommodityRole role) {
  switch (role) {
    case CommodityRole::kPayload: return "payload";
    case CommodityRole::kPropellant: return "propellant";
    case CommodityRole::kVehicle: return "vehicle";
    case CommodityRole::kCrew: return "crew";
    case CommodityRole::kCrewConsumable: return "crew_consumable";
  }
  return "payload";
}

std::string_view to_string(CommodityUnit unit) { return unit == CommodityUnit::kKg ? "kg" : "count"; }

CampaignConfig parse_config(const json& doc, const std::filesystem::path& source) {
  CampaignConfig c;
  c.source_path = source;
  Reader top(doc, "");
  c.name = top.string("name", "campaign");
  c.time_step_days = static_cast<int>(top.integer("time_step_days", 1));
  require(c.time_step_days == 1, "only a 1-day time step is supported", "/time_step_days");
  c.mission_end_day = static_cast<int>(top.integer("mission_end_day"));
  require(c.mission_end_day > 0, "must be positive", "/mission_end_day");
  c.crew_consumable_rate_per_crew = top.number("crew_consumable_rate_per_crew", 0.0);
  require(c.crew_consumable_rate_per_crew >= 0.0, "must be nonnegative", "/crew_consumable_rate_per_crew");
  c.earth_supply_factor = top.number("earth_supply_factor", 10.0);
  require(c.earth_supply_factor >= 1.0, "must be at least 1", "/earth_supply_factor");
  {
    const std::string rp = top.string("return_propellant", "carry_along");
    if (rp == "carry_along") {
      c.return_propellant = ReturnPropellant::kCarryAlong;
    } else if (rp == "prepositioned") {
      c.return_propellant = ReturnPropellant::kPrepositioned;
    } else {
      throw Error(ErrorKind::kValidationError, "expected carry_along or prepositioned", "/return_propellant");
    }
  }

  std::set<std::string> commodity_ids;
  const json& commodities = top.array("commodities");
  require(!commodities.empty(), "at least one commodity is required", "/commodities");
  for (std::size_t i = 0; i < commodities.size(); ++i) {
    const std::string p = "/commodities/" + std::to_string(i);
    Reader r(commodities[i], p);
    CommodityConfig cc;
    cc.id = r.string("id");
    require(is_identifier(cc.id), "invalid identifier", p + "/id");
    require(commodity_ids.insert(cc.id).second, "duplicate commodity id", p + "/id");
    cc.unit = parse_unit(r.string("unit", "kg"), p + "/unit");
    cc.role = parse_role(r.string("role", "payload"), p + "/role");
    cc.consumption_rate = r.number("consumption_rate", 0.0);
    cc.shortage_penalty = r.number("shortage_penalty", 0.0);
    cc.loss_weight = r.number("loss_weight", 1.0);
    cc.unit_mass = r.number("unit_mass", 1.0);
    require(cc.consumption_rate >= 0.0, "consumption rate must be nonnegative", p + "/consumption_rate");
    require(cc.shortage_penalty >= 0.0, "shortage penalty must be nonnegative", p + "/shortage_penalty");
    require(cc.loss_weight >= 0.0, "loss weight must be nonnegative", p + "/loss_weight");
    require(cc.unit_mass > 0.0, "unit mass must be positive", p + "/unit_mass");
    if (cc.shortage_penalty > 0.0 && cc.consumption_rate == 0.0) {
      throw Error(ErrorKind::kZeroRateShortage, "penalized commodity '" + cc.id + "' has zero consumption rate",
                  p + "/consumption_rate");
    }
    c.commodities.push_back(cc);
  }

  std::set<std::string> node_ids;
  int earths = 0;
  const json& nodes = top.array("nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string p = "/nodes/" + std::to_string(i);
    Reader r(nodes[i], p);
    NodeConfig n;
    n.id = r.string("id");
    require(is_identifier(n.id), "invalid identifier", p + "/id");
    require(node_ids.insert(n.id).second, "duplicate node id", p + "/id");
    n.is_station = r.boolean("is_station", false);
    n.is_earth = r.boolean("is_earth", false);
    require(!(n.is_station && n.is_earth), "a node cannot be both Earth and a station", p);
    earths += n.is_earth ? 1 : 0;
    c.nodes.push_back(n);
  }
  require(earths == 1, "exactly one node must be Earth", "/nodes");

  std::set<std::string> vehicle_names;
  const json& spacecraft = top.array("spacecraft", false);
  for (std::size_t i = 0; i < spacecraft.size(); ++i) {
    const std::string p = "/spacecraft/" + std::to_string(i);
    Reader r(spacecraft[i], p);
    SpacecraftConfig s;
    s.name = r.string("name");
    require(vehicle_names.insert(s.name).second, "duplicate spacecraft name", p + "/name");
    s.dry_mass = r.number("dry_mass");
    s.propellant_capacity = r.number("propellant_capacity");
    s.payload_capacity = r.number("payload_capacity");
    s.specific_impulse = r.number("specific_impulse");
    s.propellant_commodity = r.string("propellant_commodity");
    s.count_commodity = r.string("count_commodity");
    require(s.dry_mass > 0.0, "dry mass must be positive", p + "/dry_mass");
    require(s.propellant_capacity >= 0.0, "must be nonnegative", p + "/propellant_capacity");
    require(s.payload_capacity >= 0.0, "must be nonnegative", p + "/payload_capacity");
    require(s.specific_impulse > 0.0, "specific impulse must be positive", p + "/specific_impulse");
    require(commodity_ids.contains(s.propellant_commodity), "unknown commodity", p + "/propellant_commodity");
    require(commodity_ids.contains(s.count_commodity), "unknown commodity", p + "/count_commodity");
    c.spacecraft.push_back(s);
  }

  const json& routes = top.array("routes");
  for (std::size_t i = 0; i < routes.size(); ++i) {
    const std::string p = "/routes/" + std::to_string(i);
    Reader r(routes[i], p);
    RouteConfig rc;
    rc.origin = r.string("origin");
    rc.destination = r.string("destination");
    require(node_ids.contains(rc.origin), "unknown node", p + "/origin");
    require(node_ids.contains(rc.destination), "unknown node", p + "/destination");
    rc.flight_time_days = static_cast<int>(r.integer("flight_time_days", 0));
    rc.delta_v_km_s = r.number("delta_v_km_s", 0.0);
    require(rc.flight_time_days >= 0, "must be nonnegative", p + "/flight_time_days");
    require(rc.delta_v_km_s >= 0.0, "must be nonnegative", p + "/delta_v_km_s");
    const std::string kind = r.string("kind", "launch");
    require(kind == "launch" || kind == "transit", "expected launch or transit", p + "/kind");
    rc.kind = kind == "launch" ? RouteKind::kLaunch : RouteKind::kTransit;
    rc.vehicle = r.string("vehicle", "");
    require(rc.vehicle.empty() || vehicle_names.contains(rc.vehicle), "unknown spacecraft", p + "/vehicle");
    c.routes.push_back(rc);
  }

  const json& launches = top.array("launches");
  for (std::size_t i = 0; i < launches.size(); ++i) {
    const std::string p = "/launches/" + std::to_string(i);
    Reader r(launches[i], p);
    LaunchConfig l;
    l.nominal_day = static_cast<int>(r.integer("nominal_day"));
    require(l.nominal_day >= 0 && l.nominal_day <= c.mission_end_day, "outside the mission", p + "/nominal_day");
    l.destination = r.string("destination");
    require(node_ids.contains(l.destination), "unknown node", p + "/destination");
    l.vehicle = r.string("vehicle", "");
    require(l.vehicle.empty() || vehicle_names.contains(l.vehicle), "unknown spacecraft", p + "/vehicle");
    l.crewed = r.boolean("crewed", false);
    c.launches.push_back(l);
  }

  if (const json* dm = top.object("delay_model")) {
    Reader r(*dm, "/delay_model");
    c.delay_model.lambda = r.number("lambda", 0.05);
    c.delay_model.max_delay = static_cast<int>(r.integer("max_delay", 90));
    c.delay_model.point_mass_at_zero = r.boolean("point_mass_at_zero", false);
    c.delay_model.samples_csv = r.string("samples_csv", "");
    const json& per = r.array("per_launch_lambda", false);
    for (std::size_t i = 0; i < per.size(); ++i) {
      require(per[i].is_number() && per[i].get<double>() > 0.0, "rate must be a positive number",
              "/delay_model/per_launch_lambda/" + std::to_string(i));
      c.delay_model.per_launch_lambda.push_back(per[i].get<double>());
    }
    require(c.delay_model.lambda > 0.0, "rate must be positive", "/delay_model/lambda");
    require(c.delay_model.max_delay >= 0, "must be nonnegative", "/delay_model/max_delay");
    require(c.delay_model.per_launch_lambda.empty() || c.delay_model.per_launch_lambda.size() == c.launches.size(),
            "needs one rate per launch", "/delay_model/per_launch_lambda");
  }

  const int horizon = c.mission_end_day + c.delay_model.max_delay + 1;
  const json& demands = top.array("demands", false);
  for (std::size_t i = 0; i < demands.size(); ++i) {
    const std::string p = "/demands/" + std::to_string(i);
    Reader r(demands[i], p);
    DemandConfig d;
    d.node = r.string("node");
    require(node_ids.contains(d.node), "unknown node", p + "/node");
    d.commodity = r.string("commodity");
    require(commodity_ids.contains(d.commodity), "unknown commodity", p + "/commodity");
    d.day = static_cast<int>(r.integer("day"));
    require(d.day >= 0 && d.day < horizon, "outside the horizon", p + "/day");
    d.amount = r.number("amount");
    if (r.has("launch")) {
      const long l = r.integer("launch");
      require(l >= 0 && static_cast<std::size_t>(l) < c.launches.size(), "unknown launch index", p + "/launch");
      d.launch = static_cast<int>(l);
    } else {
      r.object("launch");
    }
    c.demands.push_back(d);
  }

  if (const json* sc = top.object("scenarios")) {
    Reader r(*sc, "/scenarios");
    c.scenarios.operating = static_cast<int>(r.integer("operating", 8));
    c.scenarios.evaluation = static_cast<int>(r.integer("evaluation", 32));
    c.scenarios.operating_seed = r.seed("operating_seed", 1);
    c.scenarios.evaluation_seed = r.seed("evaluation_seed", 2);
    require(c.scenarios.operating >= 1, "must be positive", "/scenarios/operating");
    require(c.scenarios.evaluation >= 1, "must be positive", "/scenarios/evaluation");
  }

  {
    const json& g = top.array("gammas", false);
    if (g.empty()) {
      c.gammas = {0, 100, 500, 1000, 2000, 5000, 10000, std::numeric_limits<double>::infinity()};
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::string p = "/gammas/" + std::to_string(i);
      const double v = parse_gamma(g[i], p);
      require(v >= 0.0, "gamma must be nonnegative", p);
      require(c.gammas.empty() || v > c.gammas.back(), "gammas must be strictly increasing", p);
      c.gammas.push_back(v);
    }
  }

  if (const json* so = top.object("solver")) {
    Reader r(*so, "/solver");
    c.solver.time_limit_seconds = r.number("time_limit_seconds", 600.0);
    c.solver.gap_limit = r.number("gap_limit", 1e-6);
    c.solver.max_nodes = r.integer("max_nodes", 200000);
    c.solver.threads = static_cast<int>(r.integer("threads", 1));
    require(c.solver.time_limit_seconds > 0.0, "must be positive", "/solver/time_limit_seconds");
    require(c.solver.gap_limit >= 0.0, "must be nonnegative", "/solver/gap_limit");
    require(c.solver.max_nodes >= 0, "must be nonnegative", "/solver/max_nodes");
    require(c.solver.threads >= 1, "must be positive", "/solver/threads");
  }

  if (const json* bm = top.object("big_m")) {
    Reader r(*bm, "/big_m");
    for (const char* key : {"u", "h", "day"}) {
      std::optional<double>& slot = key[0] == 'u' ? c.big_m.u : key[0] == 'h' ? c.big_m.h : c.big_m.day;
      if (r.has(key)) {
        slot = r.number(key);
        require(*slot > 0.0, "must be positive", std::string("/big_m/") + key);
      } else {
        r.object(key);
      }
    }
  }
  return c;
}

CampaignConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParseError, e.what(), path.string());
  }
  return parse_config(doc, path);
}

json resolved_config_json(const CampaignConfig& c) {
  json j;
  j["name"] = c.name;
  j["time_step_days"] = c.time_step_days;
  j["mission_end_day"] = c.mission_end_day;
  j["crew_consumable_rate_per_crew"] = c.crew_consumable_rate_per_crew;
  j["earth_supply_factor"] = c.earth_supply_factor;
  j["return_propellant"] = c.return_propellant == ReturnPropellant::kCarryAlong ? "carry_along" : "prepositioned";
  j["commodities"] = json::array();
  for (const CommodityConfig& cc : c.commodities) {
    j["commodities"].push_back({{"id", cc.id},
                                {"unit", to_string(cc.unit)},
                                {"role", to_string(cc.role)},
                                {"consumption_rate", cc.consumption_rate},
                                {"shortage_penalty", cc.shortage_penalty},
                                {"loss_weight", cc.loss_weight},
                                {"unit_mass", cc.unit_mass}});
  }
  j["nodes"] = json::array();
  for (const NodeConfig& n : c.nodes) {
    j["nodes"].push_back({{"id", n.id}, {"is_station", n.is_station}, {"is_earth", n.is_earth}});
  }
  j["spacecraft"] = json::array();
  for (const SpacecraftConfig& s : c.spacecraft) {
    j["spacecraft"].push_back({{"name", s.name},
                               {"dry_mass", s.dry_mass},
                               {"propellant_capacity", s.propellant_capacity},
                               {"payload_capacity", s.payload_capacity},
                               {"specific_impulse", s.specific_impulse},
                               {"propellant_commodity", s.propellant_commodity},
                               {"count_commodity", s.count_commodity}});
  }
  j["routes"] = json::array();
  for (const RouteConfig& r : c.routes) {
    j["routes"].push_back({{"origin", r.origin},
                           {"destination", r.destination},
                           {"flight_time_days", r.flight_time_days},
                           {"delta_v_km_s", r.delta_v_km_s},
                           {"kind", r.kind == RouteKind::kLaunch ? "launch" : "transit"},
                           {"vehicle", r.vehicle}});
  }
  j["launches"] = json::array();
  for (const LaunchConfig& l : c.launches) {
    j["launches"].push_back(
        {{"nominal_day", l.nominal_day}, {"destination", l.destination}, {"vehicle", l.vehicle}, {"crewed", l.crewed}});
  }
  j["demands"] = json::array();
  for (const DemandConfig& d : c.demands) {
    json e = {{"node", d.node}, {"commodity", d.commodity}, {"day", d.day}, {"amount", d.amount}};
    e["launch"] = d.launch ? json(*d.launch) : json(nullptr);
    j["demands"].push_back(e);
  }
  j["delay_model"] = {{"lambda", c.delay_model.lambda},
                      {"max_delay", c.delay_model.max_delay},
                      {"point_mass_at_zero", c.delay_model.point_mass_at_zero},
                      {"samples_csv", c.delay_model.samples_csv},
                      {"per_launch_lambda", c.delay_model.per_launch_lambda}};
  j["scenarios"] = {{"operating", c.scenarios.operating},
                    {"evaluation", c.scenarios.evaluation},
                    {"operating_seed", c.scenarios.operating_seed},
                    {"evaluation_seed", c.scenarios.evaluation_seed}};
  j["gammas"] = json::array();
  for (double g : c.gammas) j["gammas"].push_back(gamma_json(g));
  j["solver"] = {{"time_limit_seconds", c.solver.time_limit_seconds},
                 {"gap_limit", c.solver.gap_limit},
                 {"max_nodes", c.solver.max_nodes},
                 {"threads", c.solver.threads}};
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  j["big_m"] = {{"u", opt(c.big_m.u)}, {"h", opt(c.big_m.h)}, {"day", opt(c.big_m.day)}};
  return j;
}

std::string config_hash(const CampaignConfig& config) {
  const std::string text = resolved_config_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CampaignConfig make_cargo_only_config(int launches) {
  if (launches < 1) throw Error(ErrorKind::kValidationError, "launch count must be positive", "/launches");
  CampaignConfig c;
  c.name = "cargo_only_" + std::to_string(launches) + "launch";
  // Quarterly cadence; the final quarter closes one day after the last
  // nominal quarter boundary, as in the crewed schedule.
  c.mission_end_day = 91 * launches + 1;
  c.commodities = {
      {"science", CommodityUnit::kKg, 19.0, 0.8, 1.0, 1.0, CommodityRole::kPayload},
      {"maintenance", CommodityUnit::kKg, 9.79, 0.2, 1.0, 1.0, CommodityRole::kPayload},
      {"propellant", CommodityUnit::kKg, 0.0, 0.0, 1.0, 1.0, CommodityRole::kPropellant},
      {"centaur", CommodityUnit::kCount, 0.0, 0.0, 1.0, 1.0, CommodityRole::kVehicle},
  };
  c.nodes = {{"earth", false, true}, {"nrho", true, false}};
  c.spacecraft = {{"centaur", 2316.0, 20830.0, 10000.0, 450.5, "propellant", "centaur"}};
  c.routes = {{"earth", "nrho", 5, 3.53, RouteKind::kLaunch, "centaur"}};
  for (int l = 0; l < launches; ++l) {
    c.launches.push_back({91 * l, "nrho", "centaur", false});
    c.demands.push_back({"nrho", "science", 91 * l, -1729.0, l});
    c.demands.push_back({"nrho", "maintenance", 91 * l, -891.0, l});
  }
  c.gammas = {0, 100, 500, 1000, 2000, 5000, 10000, std::numeric_limits<double>::infinity()};
  return c;
}

int commodity_index(const CampaignConfig& config, std::string_view id) {
  for (std::size_t i = 0; i < config.commodities.size(); ++i) {
    if (config.commodities[i].id == id) return static_cast<int>(i);
  }
  throw Error(ErrorKind::kMissingCommodity, "unknown commodity '" + std::string(id) + "'");
}

int node_index(const CampaignConfig& config, std::string_view id) {
  for (std::size_t i = 0; i < config.nodes.size(); ++i) {
    if (config.nodes[i].id == id) return static_cast<int>(i);
  }
  throw Error(ErrorKind::kConfigInvalid, "unknown node '" + std::string(id) + "'");
}

}  // namespace flexplan
