#include "flexplan/decision_rules.hpp"

#include <algorithm>
#include <cmath>

#include "flexplan/errors.hpp"

namespace flexplan {

std::string_view to_string(BigMFamily family) {
  switch (family) {
    case BigMFamily::kU: return "u";
    case BigMFamily::kH: return "h";
    case BigMFamily::kB: return "b";
    case BigMFamily::kDay: return "day";
  }
  return "?";
}

std::vector<double> coverage_ceiling(const CommodityList& commodities, double max_delay) {
  std::vector<double> out(commodities.size(), 0.0);
  for (std::size_t e = 0; e < commodities.size(); ++e) {
    if (commodities[e].shortage_penalty > 0.0) out[e] = max_delay * commodities[e].consumption_rate;
  }
  return out;
}

void check_rule_commodities(const CommodityList& commodities) {
  for (const Commodity& c : commodities.entries()) {
    if (c.shortage_penalty > 0.0 && !(c.consumption_rate > 0.0)) {
      throw Error(ErrorKind::kZeroRateShortage,
                  "commodity '" + c.id + "' has a shortage penalty but no consumption rate");
    }
  }
}

std::vector<int> station_delays(const DecisionRuleSet& rules, const Scenario& scenario) {
  std::vector<int> out;
  for (int l : rules.launches) {
    if (l < 0 || static_cast<std::size_t>(l) >= scenario.delays.size()) {
      throw Error(ErrorKind::kTimelineGap, "scenario " + std::to_string(scenario.id) +
                                               " has no delay for launch " + std::to_string(l + 1));
    }
    out.push_back(scenario.delays[static_cast<std::size_t>(l)]);
  }
  return out;
}

SimulationTrace simulate_rule(const DecisionRuleSet& rules, const std::vector<int>& delays,
                              const CommodityList& commodities) {
  check_rule_commodities(commodities);
  const std::size_t L = rules.R.size();
  const std::size_t n = commodities.size();
  if (delays.size() != L) {
    throw Error(ErrorKind::kTimelineGap, "rule has " + std::to_string(L) + " launches but the scenario has " +
                                             std::to_string(delays.size()));
  }
  SimulationTrace t;
  const auto zeros = std::vector<double>(n, 0.0);
  t.u.assign(L, zeros);
  t.r.assign(L, zeros);
  t.h.assign(L, zeros);
  t.b.assign(L, zeros);
  t.alpha.assign(L, std::vector<int>(n, 0));
  t.beta.assign(L, std::vector<int>(n, 0));

  for (std::size_t e = 0; e < n; ++e) {
    const Commodity& c = commodities[e];
    if (!(c.shortage_penalty > 0.0)) continue;
    double b_prev = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      const double D = delays[l];
      const double target = l == 0 ? 0.0 : rules.R[l][e];
      const double u = l == 0 ? 0.0 : std::max(target - b_prev, 0.0);
      const double r = u + b_prev;
      t.u[l][e] = u;
      t.r[l][e] = r;
      t.h[l][e] = std::max((D - r / c.consumption_rate) * c.shortage_penalty, 0.0);
      t.b[l][e] = std::max(r - D * c.consumption_rate, 0.0);
      t.alpha[l][e] = D > r / c.consumption_rate ? 1 : 0;
      t.beta[l][e] = l > 0 && b_prev > target ? 1 : 0;
      t.Z += c.loss_weight * t.h[l][e];
      b_prev = t.b[l][e];
    }
  }
  return t;
}

BigM big_m_bounds(const CommodityList& commodities, double max_delay) {
  const std::vector<double> ceiling = coverage_ceiling(commodities, max_delay);
  const double max_ceiling = ceiling.empty() ? 0.0 : *std::max_element(ceiling.begin(), ceiling.end());
  BigM m;
  const std::size_t n = commodities.size();
  m.u.assign(n, 0.0);
  m.b.assign(n, 0.0);
  m.h.assign(n, 0.0);
  m.day.assign(n, 0.0);
  for (std::size_t e = 0; e < n; ++e) {
    const Commodity& c = commodities[e];
    m.u[e] = max_delay * c.consumption_rate + max_ceiling;
    m.b[e] = m.u[e];
    m.h[e] = max_delay * c.shortage_penalty;
    m.day[e] = c.consumption_rate > 0.0 ? max_delay + m.b[e] / c.consumption_rate : 0.0;
  }
  return m;
}

std::vector<int> station_launches(const CampaignConfig& config, const std::string& station) {
  std::vector<int> out;
  for (std::size_t l = 0; l < config.launches.size(); ++l) {
    if (config.launches[l].destination == station) out.push_back(static_cast<int>(l));
  }
  std::stable_sort(out.begin(), out.end(), [&](int a, int b) {
    return config.launches[static_cast<std::size_t>(a)].nominal_day <
           config.launches[static_cast<std::size_t>(b)].nominal_day;
  });
  if (out.empty()) throw Error(ErrorKind::kTimelineGap, "station '" + station + "' has no launches");
  return out;
}

RuleBlock build_rule_block(MilpProblem& problem, const TimeExpandedNetwork& network, int station,
                           const std::vector<int>& launches, const ScenarioSet& set, const BigM& m,
                           const RuleBlockOptions& options) {
  const CommodityList& commodities = network.commodities;
  check_rule_commodities(commodities);
  RuleBlock block;
  block.station = station;
  block.station_id = network.nodes[static_cast<std::size_t>(station)].id;
  block.launches = launches;
  block.commodities = commodities.rule_commodities();
  const std::size_t L = launches.size();
  const std::size_t C = block.commodities.size();
  const std::size_t K = set.size();
  const std::vector<double> ceiling = coverage_ceiling(commodities, network.max_delay);
  // Upper bound on r = max(R, b_prev) per commodity.
  std::vector<double> cap = ceiling;
  if (options.fixed_R != nullptr) {
    for (std::size_t l = 1; l < options.fixed_R->size(); ++l) {
      for (std::size_t e = 0; e < cap.size(); ++e) cap[e] = std::max(cap[e], (*options.fixed_R)[l][e]);
    }
  }
  const std::string& st = block.station_id;

  auto cname = [&](std::size_t c) { return commodities[static_cast<std::size_t>(block.commodities[c])].id; };
  auto tag = [&](std::size_t l, std::size_t c) { return st + "_l" + std::to_string(l + 1) + "_" + cname(c); };

  block.R.assign(L, std::vector<int>(C, -1));
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t c = 0; c < C; ++c) {
      const auto e = static_cast<std::size_t>(block.commodities[c]);
      double lo = 0.0, hi = l == 0 ? 0.0 : ceiling[e];
      if (options.fixed_R != nullptr && l > 0) lo = hi = (*options.fixed_R)[l][e];
      block.R[l][c] = problem.add_continuous("R_" + tag(l, c), lo, hi);
    }
  }

  const auto grid = std::vector<std::vector<int>>(L, std::vector<int>(C, -1));
  block.u.assign(K, grid);
  block.h.assign(K, grid);
  block.b.assign(K, grid);
  block.alpha.assign(K, grid);
  block.beta.assign(K, grid);

  for (std::size_t k = 0; k < K; ++k) {
    const Scenario& s = set.scenarios[k];
    const std::string ks = "k" + std::to_string(s.id) + "_";
    for (std::size_t l = 0; l < L; ++l) {
      const auto gl = static_cast<std::size_t>(launches[l]);
      if (gl >= s.delays.size()) {
        throw Error(ErrorKind::kTimelineGap, "scenario " + std::to_string(s.id) + " has no delay for launch " +
                                                 std::to_string(gl + 1));
      }
      const double D = s.delays[gl];
      for (std::size_t c = 0; c < C; ++c) {
        const auto e = static_cast<std::size_t>(block.commodities[c]);
        const Commodity& com = commodities[e];
        const double eta = com.consumption_rate;
        const double psi = com.shortage_penalty;
        const std::string t = ks + tag(l, c);
        const double weight = options.loss_weight * s.p * com.loss_weight;

        if (l == 0) {
          // Nothing can be stocked ahead of the first launch: r = 0.
          block.h[k][l][c] = problem.add_continuous("h_" + t, D * psi, D * psi, weight);
          block.b[k][l][c] = problem.add_continuous("b_" + t, 0.0, 0.0);
          const double a = D > 0.0 ? 1.0 : 0.0;
          block.alpha[k][l][c] = problem.add_column("alpha_" + t, ColumnKind::kBinary, a, a);
          continue;
        }

        const int R = block.R[l][c];
        const int bp = block.b[k][l - 1][c];
        const int u = problem.add_continuous("u_" + t, 0.0, kInfinity);
        const bool no_delay = D == 0.0;
        const int h = problem.add_continuous("h_" + t, 0.0, D * psi, weight);
        const int b = problem.add_continuous("b_" + t, 0.0, std::max(cap[e] - D * eta, 0.0));
        const int alpha = problem.add_column("alpha_" + t, ColumnKind::kBinary, 0.0, no_delay ? 0.0 : 1.0);
        // b after the first launch is always zero, so b_prev <= R_2.
        const int beta = problem.add_column("beta_" + t, ColumnKind::kBinary, 0.0, l == 1 ? 0.0 : 1.0);
        block.u[k][l][c] = u;
        block.h[k][l][c] = h;
        block.b[k][l][c] = b;
        block.alpha[k][l][c] = alpha;
        block.beta[k][l][c] = beta;

        // Per-row constants: r never exceeds cap[e], so each relaxed row needs
        // only what the delay of this launch allows. They replace the family
        // constant when smaller and are valid by construction.
        const double C = cap[e];
        // Carry-over into this launch is bounded by what survived the last delay.
        const double bmax =
            l == 1 ? 0.0 : std::max(C - s.delays[static_cast<std::size_t>(launches[l - 1])] * eta, 0.0);
        auto pick = [&](double family, double derived, bool& proven) {
          proven = options.tighten && derived < family;
          return proven ? std::max(derived, 0.0) : family;
        };
        auto big = [&](const std::string& name, std::vector<Term> terms, int bin, double coef_sign,
                       RowSense sense, double rhs_base, double tight, double family, double derived,
                       BigMFamily f) {
          bool proven = false;
          const double M = pick(family, derived, proven);
          terms.push_back({bin, coef_sign * M});
          // At the tight value the row reduces to its base form.
          const double rhs = rhs_base + coef_sign * M * tight;
          const int row = problem.add_row(name, std::move(terms), sense, rhs);
          block.big_m_rows.push_back({row, bin, tight, M, f, proven});
        };

        // u = max(R - b_prev, 0)
        problem.add_row("ru1_" + t, {{u, 1.0}, {R, -1.0}, {bp, 1.0}}, RowSense::kGreaterEqual, 0.0);
        big("ru2_" + t, {{u, 1.0}, {R, -1.0}, {bp, 1.0}}, beta, -1.0, RowSense::kLessEqual, 0.0, 0.0, m.u[e], bmax,
            BigMFamily::kU);
        big("ru3_" + t, {{u, 1.0}}, beta, 1.0, RowSense::kLessEqual, 0.0, 1.0, m.u[e], C, BigMFamily::kU);
        problem.add_row("ru4_" + t, {{u, 1.0}, {R, -1.0}}, RowSense::kLessEqual, 0.0);

        // h = max((D - r / eta) psi, 0)
        const double k1 = psi / eta;
        problem.add_row("rh1_" + t, {{h, 1.0}, {u, k1}, {bp, k1}}, RowSense::kGreaterEqual, D * psi);
        big("rh2_" + t, {{h, 1.0}, {u, k1}, {bp, k1}}, alpha, 1.0, RowSense::kLessEqual, D * psi, 1.0, m.h[e],
            psi * (C / eta - D), BigMFamily::kH);
        big("rh3_" + t, {{h, 1.0}}, alpha, -1.0, RowSense::kLessEqual, 0.0, 0.0, m.h[e], D * psi, BigMFamily::kH);

        // b = max(r - D eta, 0)
        problem.add_row("rb1_" + t, {{b, 1.0}, {u, -1.0}, {bp, -1.0}}, RowSense::kGreaterEqual, -D * eta);
        big("rb2_" + t, {{b, 1.0}, {u, -1.0}, {bp, -1.0}}, alpha, -1.0, RowSense::kLessEqual, -D * eta, 0.0,
            m.b[e], D * eta, BigMFamily::kB);
        big("rb3_" + t, {{b, 1.0}}, alpha, 1.0, RowSense::kLessEqual, 0.0, 1.0, m.b[e], C - D * eta,
            BigMFamily::kB);

        // alpha = [D > r / eta]
        const double inv = 1.0 / eta;
        big("ra1_" + t, {{u, inv}, {bp, inv}}, alpha, 1.0, RowSense::kLessEqual, D, 1.0, m.day[e], C / eta - D,
            BigMFamily::kDay);
        big("ra2_" + t, {{u, inv}, {bp, inv}}, alpha, 1.0, RowSense::kGreaterEqual, D, 0.0, m.day[e], D,
            BigMFamily::kDay);

        // beta = [b_prev > R]
        big("rs1_" + t, {{bp, 1.0}, {R, -1.0}}, beta, -1.0, RowSense::kGreaterEqual, 0.0, 1.0, m.b[e], C,
            BigMFamily::kB);
        big("rs2_" + t, {{bp, 1.0}, {R, -1.0}}, beta, -1.0, RowSense::kLessEqual, 0.0, 0.0, m.b[e], bmax,
            BigMFamily::kB);
      }
    }
  }
  return block;
}

DecisionRuleSet extract_rules(const RuleBlock& block, const TimeExpandedNetwork& network,
                              const std::vector<double>& values) {
  DecisionRuleSet rules;
  rules.station = block.station_id;
  rules.launches = block.launches;
  rules.R.assign(block.launches.size(), std::vector<double>(network.commodities.size(), 0.0));
  for (std::size_t l = 0; l < block.R.size(); ++l) {
    for (std::size_t c = 0; c < block.commodities.size(); ++c) {
      const double v = values[static_cast<std::size_t>(block.R[l][c])];
      rules.R[l][static_cast<std::size_t>(block.commodities[c])] = std::max(0.0, v);
    }
  }
  return rules;
}

BigMCheck check_big_m(const MilpProblem& problem, const RuleBlock& block, const std::vector<double>& values) {
  BigMCheck out;
  for (const BigMRow& r : block.big_m_rows) {
    const double z = std::round(values[static_cast<std::size_t>(r.binary)]);
    if (z == r.tight_value || r.m <= 0.0 || r.proven) continue;
    const Row& row = problem.row(r.row);
    double other = 0.0, cz = 0.0;
    for (const Term& t : row.terms) {
      if (t.column == r.binary) cz = t.coefficient;
      else other += t.coefficient * values[static_cast<std::size_t>(t.column)];
    }
    const double limit = row.rhs - cz * r.tight_value;
    const double usage = row.sense == RowSense::kGreaterEqual ? limit - other : other - limit;
    const double fraction = usage / r.m;
    if (fraction > out.worst_usage) {
      out.worst_usage = fraction;
      out.worst_family = r.family;
    }
    if (usage >= r.m - 1e-6) out.ok = false;
  }
  return out;
}

}  // namespace flexplan
