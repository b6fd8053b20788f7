#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "flexplan/config.hpp"
#include "flexplan/errors.hpp"

using namespace flexplan;
using nlohmann::json;

namespace {

json read(const char* name) {
  std::ifstream f(std::string(FLEXPLAN_DATA_DIR) + "/" + name);
  return json::parse(f, nullptr, true, true);
}

// Kind and JSON pointer of the error `doc` raises.
std::pair<ErrorKind, std::string> rejection(const json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    return {e.kind(), e.path()};
  }
  return {ErrorKind::kIoError, "accepted"};
}

}  // namespace

TEST_CASE("station fixture loads") {
  const CampaignConfig c = load_config(FLEXPLAN_DATA_DIR "/station_resupply.json");
  CHECK(c.launches.size() == 4);
  const int science = commodity_index(c, "science");
  REQUIRE(science >= 0);
  bool found = false;
  for (const DemandConfig& d : c.demands) {
    if (d.commodity == "science" && d.launch == 0) {
      CHECK(d.amount == -1729.0);
      found = true;
    }
  }
  CHECK(found);
  CHECK(c.commodities[static_cast<std::size_t>(science)].consumption_rate == doctest::Approx(19.0).epsilon(1e-3));
  CHECK(c.time_step_days == 1);
}

TEST_CASE("toy fixture loads with defaults materialized") {
  const CampaignConfig c = load_config(FLEXPLAN_DATA_DIR "/fig1_toy.json");
  CHECK(c.launches.size() == 3);
  REQUIRE(c.commodities.size() == 1);
  CHECK(c.commodities[0].consumption_rate == 1.0);
  CHECK(c.commodities[0].shortage_penalty == 1.0);
  CHECK(c.delay_model.max_delay == 90);
  CHECK(c.gammas.back() == INFINITY);
  CHECK(c.source_path.filename() == "fig1_toy.json");
}

TEST_CASE("default gamma grid") {
  json doc = read("fig1_toy.json");
  doc.erase("gammas");
  const CampaignConfig c = parse_config(doc);
  CHECK(c.gammas == std::vector<double>{0, 100, 500, 1000, 2000, 5000, 10000, INFINITY});
}

TEST_CASE("validation errors name the offending field") {
  json neg = read("fig1_toy.json");
  neg["commodities"][0]["consumption_rate"] = -1.0;
  auto [kind, path] = rejection(neg);
  CHECK(kind == ErrorKind::kValidationError);
  CHECK(path == "/commodities/0/consumption_rate");

  json extra = read("fig1_toy.json");
  extra["delay_model"]["lamda"] = 0.1;
  std::tie(kind, path) = rejection(extra);
  CHECK(kind == ErrorKind::kValidationError);
  CHECK(path == "/delay_model/lamda");

  json node = read("fig1_toy.json");
  node["demands"][1]["node"] = "moon";
  std::tie(kind, path) = rejection(node);
  CHECK(kind == ErrorKind::kValidationError);
  CHECK(path == "/demands/1/node");

  json order = read("fig1_toy.json");
  order["gammas"] = {0, 2, 1};
  std::tie(kind, path) = rejection(order);
  CHECK(kind == ErrorKind::kValidationError);
  CHECK(path == "/gammas/2");

  json launch = read("fig1_toy.json");
  launch["demands"][0]["launch"] = 9;
  std::tie(kind, path) = rejection(launch);
  CHECK(kind == ErrorKind::kValidationError);
  CHECK(path == "/demands/0/launch");
}

TEST_CASE("malformed file is a parse error") {
  const auto p = std::filesystem::temp_directory_path() / "flexplan_bad_config.json";
  {
    std::ofstream f(p);
    f << "{\"name\": ";
  }
  try {
    load_config(p);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParseError);
  }
  std::filesystem::remove(p);
}

TEST_CASE("resolved config round trips to the same hash") {
  for (const char* name : {"fig1_toy.json", "station_resupply.json", "cargo_only_4launch.json"}) {
    const CampaignConfig c = load_config(std::string(FLEXPLAN_DATA_DIR) + "/" + name);
    const json resolved = resolved_config_json(c);
    const CampaignConfig again = parse_config(resolved);
    CHECK(resolved_config_json(again) == resolved);
    CHECK(config_hash(again) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
  }
  const CampaignConfig a = load_config(FLEXPLAN_DATA_DIR "/fig1_toy.json");
  CampaignConfig b = a;
  b.delay_model.lambda = 0.06;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("bundled cargo configs match the generator") {
  CHECK(config_hash(load_config(FLEXPLAN_DATA_DIR "/cargo_only_4launch.json")) ==
        config_hash(make_cargo_only_config(4)));
  CHECK(config_hash(load_config(FLEXPLAN_DATA_DIR "/cargo_only_8launch.json")) ==
        config_hash(make_cargo_only_config(8)));
  try {
    make_cargo_only_config(0);
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kValidationError);
  }
}
