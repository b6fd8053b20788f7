#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "flexplan/artifacts.hpp"
#include "flexplan/config.hpp"
#include "flexplan/errors.hpp"

namespace fs = std::filesystem;
using namespace flexplan;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("flexplan_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Runs the CLI with a pinned timestamp; returns the exit code.
int cli(const std::string& args, const fs::path& err = "/dev/null", const fs::path& out = "/dev/null") {
  const std::string cmd = "FLEXPLAN_TIMESTAMP=2026-01-01T00:00:00Z '" FLEXPLAN_CLI "' " + args + " >'" +
                          out.string() + "' 2>'" + err.string() + "'";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Maximum likelihood rate of the truncated exponential by golden-section
// search on the log-likelihood itself.
double mle_lambda(const std::vector<double>& d, double T) {
  double sum = 0.0;
  for (double v : d) sum += v;
  const double n = static_cast<double>(d.size());
  auto ll = [&](double lam) { return n * std::log(lam / (1.0 - std::exp(-lam * T))) - lam * sum; };
  double a = 1e-6, b = 2.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 300; ++i) {
    const double c = b - g * (b - a), e = a + g * (b - a);
    if (ll(c) > ll(e)) {
      b = e;
    } else {
      a = c;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("numbers and gamma lists") {
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2600.0) == "2600");
  CHECK(parse_gamma("inf") == INFINITY);
  CHECK(parse_gamma("500") == 500.0);
  CHECK(parse_gamma_list("0,100,inf") == std::vector<double>{0, 100, INFINITY});
  CHECK_THROWS_AS(parse_gamma("-3"), Error);
  CHECK_THROWS_AS(parse_gamma_list("5,1"), Error);
}

TEST_CASE("scenario files round trip with a sidecar") {
  const fs::path dir = scratch("scen");
  ScenarioSet s;
  s.scenarios = {{0, {0, 12, 90}, 0.25}, {1, {3, 0, 7}, 0.75}};
  ArtifactMeta m;
  m.kind = "operating_scenarios";
  m.seed = 42;
  m.timestamp = "T";
  s.seed = 42;
  write_scenarios(dir / "s.json", s, m);
  // The seed comes back from the sidecar; the role is the reader's choice.
  CHECK(read_scenarios(dir / "s.json", ScenarioRole::kOperating) == s);
  const ArtifactMeta back = meta_from_json(read_json(dir / "s.json.meta.json"));
  CHECK(back.seed == 42u);
  CHECK(back.kind == "operating_scenarios");
  CHECK(scenarios_from_json(json{{"scenarios", scenarios_json(s)}}).scenarios == s.scenarios);
}

TEST_CASE("rules round trip") {
  const CampaignConfig cfg = load_config(FLEXPLAN_DATA_DIR "/station_resupply.json");
  const CommodityList& com = make_campaign(cfg).network.commodities;
  DecisionRuleSet r;
  r.station = "nrho";
  r.launches = {0, 1, 2, 3};
  r.R.assign(4, std::vector<double>(com.size(), 0.0));
  r.R[2][static_cast<std::size_t>(*com.find("science"))] = 412.5;
  r.R[3][static_cast<std::size_t>(*com.find("maintenance"))] = 0.1;
  const json j = rules_json({r}, com);
  CHECK(j["station"] == "nrho");
  const std::vector<DecisionRuleSet> back = rules_from_json(j, com);
  REQUIRE(back.size() == 1);
  CHECK(back[0].launches == r.launches);
  CHECK(back[0].R == r.R);
  CHECK(rules_from_json(json{{"stations", json::array({j, j})}}, com).size() == 2);
}

TEST_CASE("pareto csv layout") {
  ParetoPoint ok;
  ok.gamma = INFINITY;
  ok.solved = true;
  ok.evaluation.expected_J = 12.5;
  ok.evaluation.expected_Z = 1.0;
  ParetoPoint bad;
  bad.gamma = 100;
  bad.error = "StatusInvalid: no incumbent";
  ArtifactMeta m;
  m.kind = "pareto";
  m.seed = 1;
  m.timestamp = "T";
  const std::string csv = pareto_csv({bad, ok}, m);
  CHECK(csv.find("# kind=pareto\n") == 0);
  CHECK(csv.find("# failed gamma=100") != std::string::npos);
  CHECK(csv.find("gamma,expected_imleo_kg,expected_loss_days,dominated\n") != std::string::npos);
  CHECK(csv.find("\ninf,12.5,1,0\n") != std::string::npos);
}

TEST_CASE("cli: identical runs give identical bytes") {
  const fs::path a = scratch("a"), b = scratch("b");
  for (const fs::path& d : {a, b}) {
    REQUIRE(cli("gen-scenarios --config fig1_toy.json --count 6 --seed 9 --out '" + (d / "s.json").string() + "'") ==
            0);
    REQUIRE(cli("sweep --config fig1_toy.json --gammas 0,1,inf --operating 4 --evaluation 8 --out-dir '" +
                d.string() + "'") == 0);
  }
  for (const char* f : {"s.json", "s.json.meta.json", "pareto.csv", "rules_gamma_inf.json", "resolved_config.json"}) {
    INFO(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  // The sampled file is what the library samples.
  const Campaign c = make_campaign(load_config(FLEXPLAN_DATA_DIR "/fig1_toy.json"));
  CHECK(read_scenarios(a / "s.json", ScenarioRole::kOperating) == operating_scenarios(c, 6, 9));

  // Rules evaluate back through the CLI on the same scenarios.
  REQUIRE(cli("evaluate --rules '" + (a / "rules_gamma_inf.json").string() + "' --scenarios '" +
              (a / "s.json").string() + "' --out '" + (a / "report.json").string() + "'") == 0);
  const json report = read_json(a / "report.json");
  CHECK(report["expected_imleo_kg"].get<double>() > 0.0);
  CHECK(report["scenarios"].size() == 6);
}

TEST_CASE("cli: errors are JSON on stderr") {
  const fs::path d = scratch("err");
  CHECK(cli("optimize --config no_such_config.json", d / "e1") == 1);
  const json e1 = json::parse(slurp(d / "e1"));
  CHECK(e1["error"]["kind"] == "IoError");

  CHECK(cli("optimize --config fig1_toy.json --gamma abc", d / "e2") == 1);
  const json e2 = json::parse(slurp(d / "e2"));
  CHECK(e2["error"]["kind"] == "ValidationError");

  CHECK(cli("sweep", d / "e3") == 2);
  CHECK(json::parse(slurp(d / "e3"))["error"]["kind"] == "UsageError");
}

TEST_CASE("cli: fit-cdf agrees with an independent likelihood fit") {
  const fs::path d = scratch("fit");
  REQUIRE(cli("fit-cdf --samples '" FLEXPLAN_DATA_DIR "/sample_delays.csv' --out '" + (d / "fit.json").string() +
              "'") == 0);
  const json fit = read_json(d / "fit.json");

  std::ifstream f(FLEXPLAN_DATA_DIR "/sample_delays.csv");
  std::string line;
  std::getline(f, line);
  std::vector<double> delays;
  while (std::getline(f, line)) {
    const auto comma = line.find(',');
    if (std::stod(line.substr(0, comma)) <= 90.0) delays.push_back(std::stod(line.substr(comma + 1)));
  }
  CHECK(fit["samples"].get<std::size_t>() == delays.size());
  CHECK(fit["lambda"].get<double>() == doctest::Approx(mle_lambda(delays, 90.0)).epsilon(1e-6));
  CHECK(fit["metadata"]["input_hash"] == hash_file(FLEXPLAN_DATA_DIR "/sample_delays.csv"));
}
