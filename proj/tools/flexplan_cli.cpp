// flexplan: command-line front end for fitting, sampling, optimizing,
// sweeping, evaluating and exporting campaign plans.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "flexplan/artifacts.hpp"
#include "flexplan/config.hpp"
#include "flexplan/errors.hpp"
#include "flexplan/lp_format.hpp"
#include "flexplan/optimizer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace flexplan;

namespace {

#ifndef FLEXPLAN_DATA_DIR
#define FLEXPLAN_DATA_DIR "data"
#endif

// Bare fixture names fall back to the bundled data directory.
fs::path locate_config(const std::string& name) {
  fs::path p(name);
  if (fs::exists(p)) return p;
  fs::path bundled = fs::path(FLEXPLAN_DATA_DIR) / p;
  if (!p.has_parent_path() && fs::exists(bundled)) return bundled;
  throw Error(ErrorKind::kIoError, "config not found: " + name);
}

struct Loaded {
  CampaignConfig config;
  Campaign campaign;
  fs::path path;
};

Loaded load(const std::string& name) {
  Loaded l;
  l.path = fs::absolute(locate_config(name));
  l.config = load_config(l.path);
  l.campaign = make_campaign(l.config);
  return l;
}

ArtifactMeta meta_for(const Loaded& l, std::string kind, std::optional<std::uint64_t> seed) {
  ArtifactMeta m;
  m.kind = std::move(kind);
  m.seed = seed;
  m.config_hash = config_hash(l.config);
  m.config_path = l.path.string();
  m.timestamp = current_timestamp();
  return m;
}

void echo_resolved(const Loaded& l, const fs::path& dir) {
  write_json(dir / "resolved_config.json", resolved_config_json(l.config));
}

fs::path dir_of(const std::string& out) {
  const fs::path p(out);
  return p.has_parent_path() ? p.parent_path() : fs::path(".");
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) std::cout << j.dump(2) << "\n";
  else write_json(out, j);
}

struct ScenarioChoice {
  std::string file;
  int count = 0;  // 0: config default
  std::optional<std::uint64_t> seed;
};

ScenarioSet operating_set(const Loaded& l, const ScenarioChoice& c) {
  if (!c.file.empty()) return read_scenarios(c.file, ScenarioRole::kOperating);
  return operating_scenarios(l.campaign, c.count > 0 ? c.count : l.config.scenarios.operating,
                             c.seed.value_or(l.config.scenarios.operating_seed));
}

OptimizeOptions optimize_options(const Loaded& l, int threads, double time_limit) {
  OptimizeOptions o;
  o.solver = solver_options(l.config);
  if (time_limit > 0.0) o.solver.time_limit_seconds = time_limit;
  o.threads = threads > 0 ? threads : l.config.solver.threads;
  return o;
}

std::string gamma_tag(double g) { return "gamma_" + format_number(g); }

int cmd_fit_cdf(const std::string& samples, double max_delay, double window, const std::string& out) {
  const std::vector<double> d = read_delay_csv(samples, window);
  const DelayFit fit = fit_delay_cdf(d, max_delay);
  json j;
  j["lambda"] = fit.cdf.point_mass_at_zero ? json("inf") : json(fit.cdf.lambda);
  j["max_delay"] = fit.cdf.max_delay;
  j["log_likelihood"] = fit.log_likelihood;
  j["sample_mean"] = fit.sample_mean;
  j["samples"] = fit.samples;
  j["planning_window"] = window;
  j["warnings"] = fit.warnings;
  ArtifactMeta m;
  m.kind = "delay_fit";
  m.input_hash = hash_file(samples);
  m.timestamp = current_timestamp();
  j["metadata"] = meta_json(m);
  emit(j, out);
  return 0;
}

int cmd_gen_scenarios(const std::string& config, const std::string& role, int count,
                      std::optional<std::uint64_t> seed, const std::string& out) {
  const Loaded l = load(config);
  const bool eval = role == "evaluation";
  const std::uint64_t s = seed.value_or(eval ? l.config.scenarios.evaluation_seed : l.config.scenarios.operating_seed);
  const int n = count > 0 ? count : (eval ? l.config.scenarios.evaluation : l.config.scenarios.operating);
  const ScenarioSet set = eval ? evaluation_scenarios(l.campaign, n, s) : operating_scenarios(l.campaign, n, s);
  ArtifactMeta m = meta_for(l, eval ? "evaluation_scenarios" : "operating_scenarios", s);
  if (out.empty()) {
    std::cout << json({{"scenarios", scenarios_json(set)}, {"metadata", meta_json(m)}}).dump(2) << "\n";
  } else {
    write_scenarios(out, set, m);
    echo_resolved(l, dir_of(out));
  }
  return 0;
}

int cmd_optimize(const std::string& config, double gamma, const ScenarioChoice& sc, const std::string& out_dir,
                 int threads, double time_limit) {
  const Loaded l = load(config);
  const ScenarioSet op = operating_set(l, sc);
  const PointSolution s = solve_point(gamma, l.campaign, op, optimize_options(l, threads, time_limit));
  ArtifactMeta m = meta_for(l, "point_solution", op.seed);
  json sol = solution_json(s, l.campaign.network.commodities);
  sol["metadata"] = meta_json(m);
  json rules = rules_json(s.rules, l.campaign.network.commodities);
  m.kind = "rules";
  rules["metadata"] = meta_json(m);
  if (out_dir.empty()) {
    std::cout << sol.dump(2) << "\n";
  } else {
    write_json(fs::path(out_dir) / "solution.json", sol);
    write_json(fs::path(out_dir) / "rules.json", rules);
    echo_resolved(l, out_dir);
  }
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& gammas, int n_op, int n_eval,
              std::optional<std::uint64_t> seed, std::optional<std::uint64_t> eval_seed, const std::string& out_dir,
              int threads, double time_limit) {
  const Loaded l = load(config);
  const std::vector<double> grid = gammas.empty() ? l.config.gammas : parse_gamma_list(gammas);
  const std::uint64_t s = seed.value_or(l.config.scenarios.operating_seed);
  const std::uint64_t es = eval_seed.value_or(l.config.scenarios.evaluation_seed);
  const ScenarioSet op = operating_scenarios(l.campaign, n_op > 0 ? n_op : l.config.scenarios.operating, s);
  const ScenarioSet ev = evaluation_scenarios(l.campaign, n_eval > 0 ? n_eval : l.config.scenarios.evaluation, es);
  const auto points = sweep_pareto(l.campaign, grid, op, ev, optimize_options(l, threads, time_limit));

  ArtifactMeta m = meta_for(l, "pareto", s);
  m.evaluation_seed = es;
  const std::string csv = pareto_csv(points, m);
  std::cout << csv;
  if (!out_dir.empty()) {
    write_text(fs::path(out_dir) / "pareto.csv", csv);
    for (const ParetoPoint& p : points) {
      if (!p.solved) continue;
      json r = rules_json(p.solution.rules, l.campaign.network.commodities);
      ArtifactMeta rm = m;
      rm.kind = "rules";
      r["gamma"] = format_number(p.gamma);
      r["in_sample"] = {{"expected_imleo_kg", p.solution.expected_J}, {"expected_loss_days", p.solution.expected_Z},
                        {"status", std::string(status_name(p.solution.status))}, {"gap", p.solution.gap}};
      r["evaluation"] = report_json(p.evaluation);
      r["metadata"] = meta_json(rm);
      write_json(fs::path(out_dir) / ("rules_" + gamma_tag(p.gamma) + ".json"), r);
    }
    echo_resolved(l, out_dir);
  }
  for (const ParetoPoint& p : points) {
    if (!p.solved) std::cerr << json({{"warning", "point failed"}, {"gamma", format_number(p.gamma)}, {"message", p.error}}).dump() << "\n";
  }
  return 0;
}

int cmd_evaluate(std::string config, const std::string& rules_path, const std::string& scenarios_path,
                 const std::string& out, int threads) {
  const json rj = read_json(rules_path);
  if (config.empty()) {
    if (!rj.contains("metadata") || meta_from_json(rj["metadata"]).config_path.empty()) {
      throw Error(ErrorKind::kValidationError, "rules file names no config; pass --config", "/metadata/config_path");
    }
    config = meta_from_json(rj["metadata"]).config_path;
  }
  const Loaded l = load(config);
  const std::vector<DecisionRuleSet> rules = rules_from_json(rj, l.campaign.network.commodities);
  const ScenarioSet ev = read_scenarios(scenarios_path, ScenarioRole::kEvaluation);
  const EvaluationReport r = evaluate_rules(rules, ev, l.campaign, optimize_options(l, threads, 0.0));
  json j = report_json(r);
  ArtifactMeta m = meta_for(l, "evaluation_report", ev.seed);
  m.input_hash = hash_file(rules_path);
  j["metadata"] = meta_json(m);
  emit(j, out);
  return 0;
}

int cmd_export_lp(const std::string& config, double gamma, const ScenarioChoice& sc, const std::string& out,
                  bool solve) {
  if (!std::isfinite(gamma)) {
    throw Error(ErrorKind::kValidationError, "export-lp takes a finite gamma; the worst-case anchor is two solves",
                "/gamma");
  }
  const Loaded l = load(config);
  const ScenarioSet op = operating_set(l, sc);
  const AssembledProblem ap = assemble(gamma, l.campaign, op);
  ArtifactMeta m = meta_for(l, "lp", op.seed);
  std::string text = "\\ flexplan gamma=" + format_number(gamma) + " seed=" + std::to_string(op.seed) +
                     " config_hash=" + m.config_hash + "\n" + export_lp(ap.problem);
  write_text(out, text);
  echo_resolved(l, dir_of(out));
  if (!solve) return 0;

  const char* tmpl = std::getenv("FLEXPLAN_SOLVER_CMD");
  if (tmpl == nullptr || std::string(tmpl).empty()) {
    throw Error(ErrorKind::kValidationError, "FLEXPLAN_SOLVER_CMD is not set", "FLEXPLAN_SOLVER_CMD");
  }
  const std::string sol_path = out + ".sol";
  std::string cmd = tmpl;
  auto replace = [&](const std::string& key, const std::string& value) {
    for (std::size_t p = cmd.find(key); p != std::string::npos; p = cmd.find(key, p + value.size())) {
      cmd.replace(p, key.size(), value);
    }
  };
  replace("{lp}", out);
  replace("{solution}", sol_path);
  if (std::system(cmd.c_str()) != 0) throw Error(ErrorKind::kStatusInvalid, "external solver failed: " + cmd);
  const SolveResult res = import_solution(read_text(sol_path), ap.problem);
  std::vector<DecisionRuleSet> rules;
  for (const RuleBlock& b : ap.rules) rules.push_back(extract_rules(b, l.campaign.network, res.values));
  json j;
  j["objective"] = res.objective;
  j["warnings"] = res.warnings;
  j["rules"] = rules_json(rules, l.campaign.network.commodities);
  m.kind = "imported_solution";
  j["metadata"] = meta_json(m);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_cargo_config(int launches, const std::string& out) {
  emit(resolved_config_json(make_cargo_only_config(launches)), out);
  return 0;
}

void report_error(std::string_view kind, const std::string& message, const std::string& path = {}) {
  json e = {{"kind", kind}, {"message", message}};
  if (!path.empty()) e["path"] = path;
  std::cerr << json({{"error", e}}).dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flexible resupply planning under launch delay"};
  app.require_subcommand(1);

  std::string config, out, out_dir, samples, rules_path, scen_path, role = "operating", gamma_text = "0", gammas;
  double max_delay = 90.0, window = 90.0, time_limit = 0.0;
  int count = 0, n_eval = 0, threads = 0, launches = 4;
  std::optional<std::uint64_t> seed, eval_seed;
  bool solve = false;

  auto* fit = app.add_subcommand("fit-cdf", "Fit the truncated exponential delay rate to a CSV");
  fit->add_option("--samples", samples, "CSV with days_to_planned_launch,delay_days")->required();
  fit->add_option("--max-delay", max_delay, "Truncation point in days");
  fit->add_option("--window", window, "Planning window in days");
  fit->add_option("--out", out, "Output JSON (stdout if omitted)");

  auto* gen = app.add_subcommand("gen-scenarios", "Sample a delay scenario set");
  gen->add_option("--config", config)->required();
  gen->add_option("--role", role)->check(CLI::IsMember({"operating", "evaluation"}));
  gen->add_option("--count", count);
  gen->add_option("--seed", seed);
  gen->add_option("--out", out);

  auto* opt = app.add_subcommand("optimize", "Solve one weighted point");
  opt->add_option("--config", config)->required();
  opt->add_option("--gamma", gamma_text, "Loss weight, or inf");
  opt->add_option("--scenarios", scen_path, "Operating scenario file (sampled if omitted)");
  opt->add_option("--count", count);
  opt->add_option("--seed", seed);
  opt->add_option("--out-dir", out_dir);
  opt->add_option("--threads", threads);
  opt->add_option("--time-limit", time_limit);

  auto* sweep = app.add_subcommand("sweep", "Trace the Pareto front over a gamma grid");
  sweep->add_option("--config", config)->required();
  sweep->add_option("--gammas", gammas, "Comma-separated, e.g. 0,100,inf");
  sweep->add_option("--operating", count);
  sweep->add_option("--evaluation", n_eval);
  sweep->add_option("--seed", seed);
  sweep->add_option("--eval-seed", eval_seed);
  sweep->add_option("--out-dir", out_dir);
  sweep->add_option("--threads", threads);
  sweep->add_option("--time-limit", time_limit);

  auto* eval = app.add_subcommand("evaluate", "Evaluate rules on a scenario set");
  eval->add_option("--config", config, "Defaults to the config named in the rules metadata");
  eval->add_option("--rules", rules_path)->required();
  eval->add_option("--scenarios", scen_path)->required();
  eval->add_option("--out", out);
  eval->add_option("--threads", threads);

  auto* lp = app.add_subcommand("export-lp", "Write the MILP in LP format");
  lp->add_option("--config", config)->required();
  lp->add_option("--gamma", gamma_text);
  lp->add_option("--scenarios", scen_path);
  lp->add_option("--count", count);
  lp->add_option("--seed", seed);
  lp->add_option("--out", out)->required();
  lp->add_flag("--solve", solve, "Run FLEXPLAN_SOLVER_CMD ({lp}, {solution}) and import the result");

  auto* cargo = app.add_subcommand("make-cargo-config", "Write a cargo-only campaign config");
  cargo->add_option("--launches", launches)->check(CLI::PositiveNumber);
  cargo->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("UsageError", e.what());
    return 2;
  }

  try {
    const ScenarioChoice sc{scen_path, count, seed};
    if (*fit) return cmd_fit_cdf(samples, max_delay, window, out);
    if (*gen) return cmd_gen_scenarios(config, role, count, seed, out);
    if (*opt) return cmd_optimize(config, parse_gamma(gamma_text), sc, out_dir, threads, time_limit);
    if (*sweep) return cmd_sweep(config, gammas, count, n_eval, seed, eval_seed, out_dir, threads, time_limit);
    if (*eval) return cmd_evaluate(config, rules_path, scen_path, out, threads);
    if (*lp) return cmd_export_lp(config, parse_gamma(gamma_text), sc, out, solve);
    if (*cargo) return cmd_cargo_config(launches, out);
  } catch (const Error& e) {
    report_error(error_kind_name(e.kind()), e.what(), e.path());
    return 1;
  } catch (const std::exception& e) {
    report_error("InternalError", e.what());
    return 1;
  }
  return 0;
}
