// Acceptance checks, one PASS/FAIL line per criterion. Run a single
// criterion with --only N; --desk picks the campaign used for the anchor
// and monotonicity checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flexplan/config.hpp"
#include "flexplan/decision_rules.hpp"
#include "flexplan/logistics.hpp"
#include "flexplan/milp.hpp"
#include "flexplan/optimizer.hpp"
#include "flexplan/scenario.hpp"
#include "lp_oracle.hpp"
#include "random_problems.hpp"
#include "rule_fixtures.hpp"

using namespace flexplan;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool integral(double v, double want) { return std::abs(v - want) < 1e-9; }

Campaign load(const std::string& name) { return make_campaign(load_config(std::string(FLEXPLAN_DATA_DIR) + "/" + name)); }

std::string desk_file = "station_resupply.json";

// ---------------------------------------------------------------------------

Outcome toy_reproduction() {
  const Campaign c = load("fig1_toy.json");
  ScenarioSet one;
  one.scenarios = {{0, {0, 50, 50}, 1.0}};
  DecisionRuleSet none{"station", {0, 1, 2}, {{0.0}, {0.0}, {0.0}}};
  DecisionRuleSet fifty{"station", {0, 1, 2}, {{0.0}, {50.0}, {50.0}}};

  const double z0 = simulate_rule(none, one.scenarios[0].delays, c.network.commodities).Z;
  const double z50 = simulate_rule(fifty, one.scenarios[0].delays, c.network.commodities).Z;
  const EvaluationReport r0 = evaluate_rules({none}, one, c);
  const EvaluationReport r50 = evaluate_rules({fifty}, one, c);
  const bool ok = integral(z0, 100) && integral(r0.expected_Z, 100) && integral(r0.expected_J, 200) &&
                  integral(z50, 0) && integral(r50.expected_Z, 0);
  return {ok, fmt("R=0: loss %g d, delivered %g kg; R2=R3=50: loss %g d", r0.expected_Z, r0.expected_J,
                  r50.expected_Z)};
}

Outcome stock_ceiling() {
  const Campaign c = load("station_resupply.json");
  const std::vector<double> ceil = coverage_ceiling(c.network.commodities, c.network.max_delay);
  double total = 0.0;
  for (double v : ceil) total += v;
  const double rel = std::abs(total - 2600.0) / 2600.0;
  return {rel <= 0.02, fmt("full-coverage stock %.1f kg vs 2600 kg (%.2f%%)", total, 100 * rel)};
}

// Loss on launches after the first, summed over the operating set.
double later_launch_loss(const DecisionRuleSet& r, const ScenarioSet& set, const CommodityList& com) {
  double z = 0.0;
  for (const Scenario& s : set.scenarios) {
    const SimulationTrace t = simulate_rule(r, station_delays(r, s), com);
    for (std::size_t l = 1; l < t.h.size(); ++l) {
      for (std::size_t e = 0; e < t.h[l].size(); ++e) z += s.p * com[e].loss_weight * t.h[l][e];
    }
  }
  return z;
}

Outcome anchors() {
  const Campaign c = load(desk_file);
  const ScenarioSet op = operating_scenarios(c, 8, c.config.scenarios.operating_seed);
  const auto t0 = std::chrono::steady_clock::now();
  const PointSolution lo = solve_point(0.0, c, op);
  const PointSolution hi = solve_point(kInf, c, op);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const CommodityList& com = c.network.commodities;
  const std::vector<double> ceil = coverage_ceiling(com, c.network.max_delay);

  bool zero = lo.status == SolveStatus::kOptimal;
  for (const DecisionRuleSet& r : lo.rules) {
    for (const auto& row : r.R) {
      for (double v : row) zero = zero && std::abs(v) < 1e-6;
    }
  }
  bool at_ceiling = hi.status == SolveStatus::kOptimal;
  double later = 0.0;
  for (const DecisionRuleSet& r : hi.rules) {
    for (std::size_t l = 1; l < r.R.size(); ++l) {
      for (std::size_t e = 0; e < ceil.size(); ++e) {
        if (ceil[e] > 0) at_ceiling = at_ceiling && std::abs(r.R[l][e] - ceil[e]) < 1e-6;
      }
    }
    later += later_launch_loss(r, op, com);
  }

  // Minimum in-sample E[J]: nothing cheaper among the other anchor and
  // random target vectors, all evaluated on the same scenarios.
  const double jmin = evaluate_rules(lo.rules, op, c).expected_J;
  bool minimal = std::abs(jmin - lo.expected_J) <= 1e-5 * std::max(1.0, jmin);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<DecisionRuleSet>> rivals = {hi.rules};
  for (int i = 0; i < 5; ++i) {
    std::vector<DecisionRuleSet> rs = lo.rules;
    for (DecisionRuleSet& r : rs) {
      for (std::size_t l = 1; l < r.R.size(); ++l) {
        for (std::size_t e = 0; e < ceil.size(); ++e) r.R[l][e] = ceil[e] * u(rng);
      }
    }
    rivals.push_back(rs);
  }
  for (const auto& rs : rivals) minimal = minimal && evaluate_rules(rs, op, c).expected_J >= jmin - 1e-6;

  const bool ok = zero && at_ceiling && minimal && later <= 1e-6 && secs < 60.0;
  return {ok, fmt("%s: gamma=0 R=0 %s, E[J]=%.2f minimal %s; gamma=inf at ceiling %s, later-launch loss %.2g, "
                  "launch-1 loss %.3f; %.1f s",
                  desk_file.c_str(), zero ? "yes" : "no", jmin, minimal ? "yes" : "no", at_ceiling ? "yes" : "no",
                  later, hi.expected_Z - later, secs)};
}

Outcome monotone_front() {
  const Campaign c = load(desk_file);
  const ScenarioSet op = operating_scenarios(c, 8, c.config.scenarios.operating_seed);
  const std::vector<double> grid = {0, 100, 500, 1000, 2000, 5000, 10000, kInf};
  OptimizeOptions o;
  o.solver.time_limit_seconds = kInf;
  o.solver.gap_limit = 1e-6;
  std::vector<PointSolution> pts;
  std::string trace;
  bool solved = true;
  for (double g : grid) {
    const auto t0 = std::chrono::steady_clock::now();
    pts.push_back(solve_point(g, c, op, o));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    solved = solved && pts.back().status == SolveStatus::kOptimal;
    std::printf("  gamma=%-6g E[J]=%.4f E[Z]=%.4f gap=%.1e nodes=%ld %.1f s\n", g, pts.back().expected_J,
                pts.back().expected_Z, pts.back().gap, pts.back().nodes, secs);
    std::fflush(stdout);
  }
  bool mono = true;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double tolJ = 1e-6 * std::max(1.0, std::abs(pts[i - 1].expected_J));
    mono = mono && pts[i].expected_J >= pts[i - 1].expected_J - tolJ;
    mono = mono && pts[i].expected_Z <= pts[i - 1].expected_Z + 1e-6;
  }
  bool concave = true;
  auto v = [&](std::size_t j) { return pts[j].expected_J + grid[j] * pts[j].expected_Z; };
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    if (std::isinf(grid[i + 1])) break;
    const double t = (grid[i] - grid[i - 1]) / (grid[i + 1] - grid[i - 1]);
    concave = concave && v(i) >= (1 - t) * v(i - 1) + t * v(i + 1) - 1e-6 * std::max(1.0, v(i));
  }
  return {solved && mono && concave, fmt("%s, %zu gamma points: all optimal %s, monotone %s, concave %s",
                                         desk_file.c_str(), grid.size(), solved ? "yes" : "no", mono ? "yes" : "no",
                                         concave ? "yes" : "no")};
}

Outcome linearization() {
  std::mt19937_64 rng(20261015);
  double worst = 0.0;
  int bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const fixtures::RuleInstance in = fixtures::random_rule_instance(rng);
    RuleBlockOptions o;
    o.fixed_R = &in.R;
    MilpProblem p;
    const RuleBlock b = build_rule_block(p, in.network, 1, in.launches, in.set,
                                         big_m_bounds(in.network.commodities, in.network.max_delay), o);
    const SolveResult r = solve_milp(p);
    if (r.status != SolveStatus::kOptimal) {
      ++bad;
      continue;
    }
    const DecisionRuleSet rules{"station", in.launches, in.R};
    for (std::size_t k = 0; k < in.set.size(); ++k) {
      const SimulationTrace t = simulate_rule(rules, in.set.scenarios[k].delays, in.network.commodities);
      for (std::size_t l = 0; l < in.launches.size(); ++l) {
        for (std::size_t c = 0; c < b.commodities.size(); ++c) {
          const auto e = static_cast<std::size_t>(b.commodities[c]);
          const int uc = b.u[k][l][c];
          const double u = uc < 0 ? 0.0 : r.value(uc);
          worst = std::max({worst, std::abs(u - t.u[l][e]), std::abs(r.value(b.h[k][l][c]) - t.h[l][e]),
                            std::abs(r.value(b.b[k][l][c]) - t.b[l][e])});
        }
      }
    }
  }
  return {bad == 0 && worst <= 1e-6, fmt("200 instances, %d unsolved, max |MILP - recursion| = %.2e", bad, worst)};
}

Outcome brute_force() {
  const Campaign c = load("fig1_toy.json");
  const ScenarioSet op = operating_scenarios(c, 8, c.config.scenarios.operating_seed);
  bool ok = true;
  std::string detail;
  for (double gamma : {0.5, 2.0, 5.0}) {
    const PointSolution s = solve_point(gamma, c, op);
    const double milp = s.expected_J + gamma * s.expected_Z;
    // f over the 10 kg grid of (R2, R3).
    std::vector<std::vector<double>> f(10, std::vector<double>(10));
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < 10; ++i) {
      for (std::size_t j = 0; j < 10; ++j) {
        DecisionRuleSet r{"station", {0, 1, 2}, {{0.0}, {10.0 * i}, {10.0 * j}}};
        const EvaluationReport e = evaluate_rules({r}, op, c);
        f[i][j] = e.expected_J + gamma * e.expected_Z;
        if (f[i][j] < f[bi][bj]) bi = i, bj = j;
      }
    }
    double cell = 0.0;
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        const int i = static_cast<int>(bi) + di, j = static_cast<int>(bj) + dj;
        if (i < 0 || j < 0 || i > 9 || j > 9) continue;
        cell = std::max(cell, std::abs(f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - f[bi][bj]));
      }
    }
    const double diff = f[bi][bj] - milp;
    ok = ok && diff >= -1e-6 && diff <= cell + 1e-9;
    detail += fmt("gamma=%g MILP %.4f grid %.4f step %.4f; ", gamma, milp, f[bi][bj], cell);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome sampler() {
  const auto t0 = std::chrono::steady_clock::now();
  const TruncExpCdf cdf{0.05, 90.0};
  const int n = 100000;
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = cdf.inverse(uniform_draw(20261015, static_cast<std::uint64_t>(i)));
  std::vector<double> sorted = d;
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sorted[static_cast<std::size_t>(i)];
    const double F = (1.0 - std::exp(-0.05 * x)) / (1.0 - std::exp(-0.05 * 90.0));
    ks = std::max({ks, std::abs(F - static_cast<double>(i) / n), std::abs(F - static_cast<double>(i + 1) / n)});
  }
  const double lam = fit_delay_cdf(d, 90.0).cdf.lambda;
  const double err = std::abs(lam - 0.05) / 0.05;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {ks < 0.01 && err < 0.05 && secs < 10.0,
          fmt("KS %.5f, fitted lambda %.5f (%.2f%% off), %.2f s", ks, lam, 100 * err, secs)};
}

Outcome solver() {
  std::mt19937_64 rng(99);
  int mismatched = 0, compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const MilpProblem p = testgen::random_problem(rng, 10, 16, 4 + trial % 9);
    const auto want = oracle::enumerate_milp(p);
    for (BranchRule rule : {BranchRule::kMostFractional, BranchRule::kPenalty}) {
      SolverOptions o;
      o.branching = rule;
      const SolveResult got = solve_milp(p, o);
      const bool same = want ? got.status == SolveStatus::kOptimal &&
                                   std::abs(got.objective - *want) <= 1e-6 * std::max(1.0, std::abs(*want))
                             : got.status == SolveStatus::kInfeasible;
      mismatched += !same;
    }
  }
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const MilpProblem p = testgen::random_problem(rng, 20, 20, 0);
    const oracle::LpAnswer want = oracle::solve_lp(p);
    const SolveResult got = solve_lp(p);
    if (want.status == oracle::LpAnswer::kOptimal) {
      if (got.status != SolveStatus::kOptimal) {
        ++mismatched;
        continue;
      }
      worst = std::max(worst, std::abs(got.objective - want.objective) / std::max(1.0, std::abs(want.objective)));
      ++compared;
    } else if (got.status == SolveStatus::kOptimal) {
      ++mismatched;
    }
  }
  return {mismatched == 0 && worst <= 1e-6,
          fmt("100 MILPs x 2 branching rules vs enumeration, %d LPs vs oracle: %d mismatches, worst LP gap %.1e",
              compared, mismatched, worst)};
}

Outcome sample_size() {
  const Campaign c = load("fig1_toy.json");
  const ScenarioSet eval = evaluation_scenarios(c, 64, c.config.scenarios.evaluation_seed);
  const ScenarioSet small = operating_scenarios(c, 8, c.config.scenarios.operating_seed);
  const ScenarioSet large = operating_scenarios(c, 32, c.config.scenarios.operating_seed);
  const auto a = sweep_pareto(c, c.config.gammas, small, eval);
  const auto b = sweep_pareto(c, c.config.gammas, large, eval);
  bool ok = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].solved || !b[i].solved) {
      ok = false;
      continue;
    }
    const double se = std::hypot(a[i].evaluation.se_Z, b[i].evaluation.se_Z);
    const double d = std::abs(a[i].evaluation.expected_Z - b[i].evaluation.expected_Z);
    worst = std::max(worst, se > 0 ? d / se : (d > 1e-9 ? kInf : 0.0));
    ok = ok && d <= 3.0 * se + 1e-9;
  }
  return {ok, fmt("toy campaign, %zu gamma points, 8 vs 32 operating scenarios on 64 shared: worst |dE[Z]| = %.2f SE",
                  a.size(), worst)};
}

struct FrontPoint {
  double gamma = 0.0;
  double z = 0.0, j = 0.0;  // per launch
  bool optimal = false;
};

std::vector<FrontPoint> per_launch_front(int launches, const ScenarioSet& op, const std::vector<double>& grid,
                                         double time_limit) {
  const Campaign c = make_campaign(make_cargo_only_config(launches));
  OptimizeOptions o;
  o.solver.time_limit_seconds = time_limit;
  std::vector<FrontPoint> out;
  for (double g : grid) {
    const PointSolution s = solve_point(g, c, op, o);
    out.push_back({g, s.expected_Z / launches, s.expected_J / launches, s.status == SolveStatus::kOptimal});
    std::printf("  %d launches gamma=%-6g E[J]/L=%.3f E[Z]/L=%.4f %s gap=%.1e\n", launches, g, out.back().j,
                out.back().z, std::string(status_name(s.status)).c_str(), s.gap);
    std::fflush(stdout);
  }
  return out;
}

// The 8-launch campaign reuses the 4-launch delays for its first four
// launches, so both see the same unavoidable first-launch loss. The
// 4-launch front is drawn through its non-dominated finite-gamma points
// (all solved to optimality) and is flat at its cost-only value past the
// largest loss; 8-launch points with less loss than its floor must cost no
// more than the floor point. 8-launch points are incumbents under a time limit, which
// can only overstate their cost. The worst-case anchors, both free of
// later-launch loss, are compared directly.
Outcome horizon() {
  const std::vector<double> grid = {0, 100, 500, 1000, 2000, 5000, 10000, kInf};
  const Campaign four_c = make_campaign(make_cargo_only_config(4));
  const std::uint64_t seed = four_c.config.scenarios.operating_seed;
  const ScenarioSet op4 = operating_scenarios(four_c, 8, seed);
  const ScenarioSet extra = operating_scenarios(four_c, 8, seed + 1);
  ScenarioSet op8 = op4;
  for (std::size_t k = 0; k < op8.size(); ++k) {
    auto& d = op8.scenarios[k].delays;
    d.insert(d.end(), extra.scenarios[k].delays.begin(), extra.scenarios[k].delays.end());
  }

  const auto four = per_launch_front(4, op4, grid, kInf);
  const auto eight = per_launch_front(8, op8, grid, 60.0);
  bool ok = std::all_of(four.begin(), four.end(), [](const FrontPoint& p) { return p.optimal; });

  std::vector<FrontPoint> curve;
  for (const FrontPoint& p : four) {
    if (std::isinf(p.gamma)) continue;
    const bool dominated = std::any_of(four.begin(), four.end(), [&](const FrontPoint& q) {
      return !std::isinf(q.gamma) && q.z <= p.z && q.j <= p.j && (q.z < p.z || q.j < p.j);
    });
    if (!dominated) curve.push_back(p);
  }
  std::sort(curve.begin(), curve.end(), [](const FrontPoint& a, const FrontPoint& b) { return a.z < b.z; });

  int matched = 0, proven = 0, below = 0;
  double worst = -kInf, worst_below = -kInf;
  for (const FrontPoint& p : eight) {
    if (std::isinf(p.gamma)) continue;
    double ref = kInf;
    if (p.z >= curve.back().z - 1e-9) {
      ref = curve.back().j;
    } else {
      for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const FrontPoint& a = curve[i];
        const FrontPoint& b = curve[i + 1];
        if (p.z < a.z - 1e-9 || p.z > b.z + 1e-9) continue;
        ref = b.z - a.z < 1e-12 ? std::min(a.j, b.j) : a.j + (b.j - a.j) * (p.z - a.z) / (b.z - a.z);
        break;
      }
    }
    if (std::isinf(ref)) {
      // Less loss than any 4-launch plan achieves: it must also cost no
      // more than the 4-launch minimal-loss plan.
      ++below;
      worst_below = std::max(worst_below, p.j - curve.front().j);
      ok = ok && p.j <= curve.front().j + 1e-6 * curve.front().j;
      continue;
    }
    ++matched;
    proven += p.optimal;
    worst = std::max(worst, p.j - ref);
    ok = ok && p.j <= ref + 1e-6 * std::max(1.0, ref);
  }
  const double anchor4 = four.back().j, anchor8 = eight.back().j;
  ok = ok && eight.back().optimal && anchor8 <= anchor4 + 1e-6 * anchor4 && matched > 0;
  return {ok, fmt("cargo-only 4 vs 8 launches, shared early delays: %d matched points (%d proven optimal), worst "
                  "per-launch E[J] change %+.3f kg; %d points below the 4-launch loss floor, worst %+.3f kg; "
                  "worst-case anchors %.1f vs %.1f kg per launch",
                  matched, proven, worst, below, worst_below, anchor8, anchor4)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("acceptance checks");
  int only = 0;
  app.add_option("--only", only, "Run a single criterion (1-9)");
  app.add_option("--desk", desk_file, "Campaign for the anchor and monotonicity checks");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 toy reproduction", toy_reproduction},
      {"2 safety-stock ceiling", stock_ceiling},
      {"3 anchor points", anchors},
      {"4 weighted-sum monotonicity", monotone_front},
      {"5 linearization vs recursion", linearization},
      {"6 brute-force grid", brute_force},
      {"7 sampler fidelity", sampler},
      {"8 solver correctness", solver},
      {"9a sample-size insensitivity", sample_size},
      {"9b horizon effect", horizon},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (only != 0 && std::stoi(name) != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %s: %s (%s; %.1f s)\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
