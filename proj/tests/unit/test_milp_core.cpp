#include <cmath>
#include <random>

#include "doctest.h"
#include "flexplan/errors.hpp"
#include "flexplan/lp_format.hpp"
#include "flexplan/lp_solver.hpp"
#include "flexplan/milp.hpp"
#include "lp_oracle.hpp"
#include "random_problems.hpp"

using namespace flexplan;

namespace {

MilpProblem knapsack() {
  // max 30a + 40b + 50c s.t. 3a + 4b + 5c <= 7, written as a minimization.
  MilpProblem p;
  const int a = p.add_binary("a", -30.0);
  const int b = p.add_binary("b", -40.0);
  const int c = p.add_binary("c", -50.0);
  p.add_row("weight", {{a, 3.0}, {b, 4.0}, {c, 5.0}}, RowSense::kLessEqual, 7.0);
  return p;
}

}  // namespace

TEST_CASE("problem container validates names and binary bounds") {
  MilpProblem p;
  p.add_continuous("x");
  CHECK_THROWS_AS(p.add_continuous("x"), Error);
  CHECK_THROWS_AS(p.add_column("b", ColumnKind::kBinary, 0.0, 2.0), Error);
  CHECK_THROWS_AS(p.add_row("r", {{5, 1.0}}, RowSense::kEqual, 0.0), Error);
  const int r = p.add_row("r", {{0, 1.0}, {0, 2.0}}, RowSense::kEqual, 0.0);
  REQUIRE(p.row(r).terms.size() == 1);
  CHECK(p.row(r).terms[0].coefficient == 3.0);
}

TEST_CASE("lp: min x s.t. x >= 3") {
  MilpProblem p;
  const int x = p.add_continuous("x", 0.0, kInfinity, 1.0);
  p.add_row("c", {{x, 1.0}}, RowSense::kGreaterEqual, 3.0);
  const SolveResult r = solve_lp(p);
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(3.0));
}

TEST_CASE("lp: textbook vertex") {
  MilpProblem p;
  const int x = p.add_continuous("x", 0.0, kInfinity, -1.0);
  const int y = p.add_continuous("y", 0.0, kInfinity, -1.0);
  p.add_row("c", {{x, 1.0}, {y, 1.0}}, RowSense::kLessEqual, 1.0);
  const SolveResult r = solve_lp(p);
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(-1.0));
  // A vertex has one of the two at zero.
  CHECK(std::min(r.value(x), r.value(y)) == doctest::Approx(0.0));
}

TEST_CASE("lp: infeasible and unbounded are statuses") {
  MilpProblem inf;
  const int x = inf.add_continuous("x", 0.0, 1.0);
  inf.add_row("c", {{x, 1.0}}, RowSense::kGreaterEqual, 2.0);
  CHECK(solve_lp(inf).status == SolveStatus::kInfeasible);

  MilpProblem unb;
  const int y = unb.add_continuous("y", 0.0, kInfinity, -1.0);
  unb.add_row("c", {{y, 1.0}}, RowSense::kGreaterEqual, 0.0);
  CHECK(solve_lp(unb).status == SolveStatus::kUnbounded);
}

TEST_CASE("lp: free and negative-bounded columns, equality rows") {
  MilpProblem p;
  const int x = p.add_continuous("x", -kInfinity, kInfinity, 1.0);
  const int y = p.add_continuous("y", -5.0, -1.0, 2.0);
  p.add_row("e", {{x, 1.0}, {y, 1.0}}, RowSense::kEqual, 4.0);
  p.add_row("g", {{x, 1.0}}, RowSense::kGreaterEqual, -10.0);
  const SolveResult r = solve_lp(p);
  REQUIRE(r.status == SolveStatus::kOptimal);
  // x = 4 - y, cost = 4 + y, so y at its lower bound -5.
  CHECK(r.value(y) == doctest::Approx(-5.0));
  CHECK(r.objective == doctest::Approx(-1.0));
}

TEST_CASE("lp: randomized problems match the textbook oracle") {
  std::mt19937_64 rng(20240611);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const MilpProblem p = testgen::random_problem(rng, 20, 20, 0);
    const oracle::LpAnswer want = oracle::solve_lp(p);
    const SolveResult got = solve_lp(p);
    if (want.status == oracle::LpAnswer::kInfeasible) {
      CHECK(got.status == SolveStatus::kInfeasible);
      continue;
    }
    REQUIRE(got.status == SolveStatus::kOptimal);
    CHECK(got.objective == doctest::Approx(want.objective).epsilon(1e-6));
    CHECK(p.max_violation(got.values) <= 1e-6);
    CHECK(got.bound <= got.objective + 1e-9);
    ++compared;
  }
  CHECK(compared > 20);
}

TEST_CASE("lp: serial and parallel kernels pivot identically") {
  std::mt19937_64 rng(7);
  const MilpProblem p = testgen::random_problem(rng, 30, 40, 0);
  SolverOptions serial, parallel;
  parallel.kernel = KernelMode::kParallel;
  const SolveResult a = solve_lp(p, serial);
  const SolveResult b = solve_lp(p, parallel);
  CHECK(a.status == b.status);
  CHECK(a.iterations == b.iterations);
  CHECK(a.values == b.values);
}

TEST_CASE("warm start after bound changes matches a cold solve") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    MilpProblem p = testgen::random_problem(rng, 15, 15, 0);
    DenseSimplex warm(p);
    if (warm.solve() != LpStatus::kOptimal) continue;
    const double mid = p.column(3).upper / 2.0;
    warm.set_column_bounds(3, 0.0, mid);
    p.set_bounds(3, 0.0, mid);
    const LpStatus ws = warm.reoptimize();
    const SolveResult cold = solve_lp(p);
    if (cold.status != SolveStatus::kOptimal) {
      CHECK(ws == LpStatus::kInfeasible);
      continue;
    }
    REQUIRE(ws == LpStatus::kOptimal);
    CHECK(warm.objective_value() == doctest::Approx(cold.objective).epsilon(1e-7));
  }
}

TEST_CASE("milp: knapsack optimum is 70") {
  const SolveResult r = solve_milp(knapsack());
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(-70.0));
  CHECK(r.value(0) == 1.0);
  CHECK(r.value(1) == 1.0);
  CHECK(r.value(2) == 0.0);
  CHECK(r.gap <= 1e-6);
}

TEST_CASE("milp: integral relaxation needs no branching") {
  MilpProblem p;
  const int a = p.add_binary("a", -1.0);
  const int b = p.add_binary("b", -1.0);
  p.add_row("c", {{a, 1.0}, {b, 1.0}}, RowSense::kLessEqual, 2.0);
  const SolveResult r = solve_milp(p);
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.nodes == 0);
  CHECK(r.objective == doctest::Approx(-2.0));
}

TEST_CASE("milp: random instances match enumeration") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 30; ++trial) {
    const MilpProblem p = testgen::random_problem(rng, 8, 12, 6);
    const auto want = oracle::enumerate_milp(p);
    const SolveResult got = solve_milp(p);
    if (!want) {
      CHECK(got.status == SolveStatus::kInfeasible);
      continue;
    }
    REQUIRE(got.status == SolveStatus::kOptimal);
    CHECK(got.objective == doctest::Approx(*want).epsilon(1e-6));
    CHECK(got.bound <= got.objective + 1e-9);
  }
}

TEST_CASE("milp: penalty branching matches enumeration") {
  std::mt19937_64 rng(4242);
  SolverOptions o;
  o.branching = BranchRule::kPenalty;
  for (int trial = 0; trial < 40; ++trial) {
    const MilpProblem p = testgen::random_problem(rng, 8, 12, 7);
    const auto want = oracle::enumerate_milp(p);
    const SolveResult got = solve_milp(p, o);
    if (!want) {
      CHECK(got.status == SolveStatus::kInfeasible);
      continue;
    }
    REQUIRE(got.status == SolveStatus::kOptimal);
    CHECK(got.objective == doctest::Approx(*want).epsilon(1e-6));
    CHECK(got.bound <= got.objective + 1e-9);
  }
}

TEST_CASE("lp: dual penalties never overstate the child optimum") {
  std::mt19937_64 rng(77);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const MilpProblem p = testgen::random_problem(rng, 6, 10, 5);
    DenseSimplex root(p);
    if (root.solve() != LpStatus::kOptimal) continue;
    const std::vector<double> x = root.column_values();
    for (std::size_t j = 0; j < p.num_columns(); ++j) {
      if (p.column(static_cast<int>(j)).kind != ColumnKind::kBinary) continue;
      if (std::abs(x[j] - std::round(x[j])) < 1e-6) continue;
      const auto [down, up] = root.branching_penalties(static_cast<int>(j), 0.0, 1.0);
      for (int side = 0; side < 2; ++side) {
        DenseSimplex child = root;
        child.set_column_bounds(static_cast<int>(j), side == 0 ? 0.0 : 1.0, side == 0 ? 0.0 : 1.0);
        const LpStatus st = child.reoptimize();
        const double lift = side == 0 ? down : up;
        if (st == LpStatus::kOptimal) {
          CHECK(root.objective_value() + lift <= child.objective_value() + 1e-7);
          ++checked;
        } else {
          CHECK(st == LpStatus::kInfeasible);
        }
      }
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("milp: determinism") {
  std::mt19937_64 rng(5);
  const MilpProblem p = testgen::random_problem(rng, 10, 14, 8);
  const SolveResult a = solve_milp(p);
  const SolveResult b = solve_milp(p);
  CHECK(a.values == b.values);
  CHECK(a.nodes == b.nodes);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("milp: node limit reports the incumbent") {
  std::mt19937_64 rng(11);
  SolverOptions opts;
  opts.max_nodes = 1;
  for (int trial = 0; trial < 10; ++trial) {
    const MilpProblem p = testgen::random_problem(rng, 10, 14, 10);
    const SolveResult r = solve_milp(p, opts);
    if (r.status == SolveStatus::kGapLimit) CHECK(!r.values.empty());
    CHECK(r.status != SolveStatus::kUnbounded);
  }
}

TEST_CASE("lp format: empty problem is header and End") {
  const std::string text = export_lp(MilpProblem{});
  CHECK(text.find("End") != std::string::npos);
  CHECK(text.find("Subject To") == std::string::npos);
  CHECK(parse_lp(text) == MilpProblem{});
}

TEST_CASE("lp format: round trip reproduces the problem") {
  MilpProblem one;
  one.add_continuous("x", 0.0, 4.5, 1.0 / 3.0);
  CHECK(parse_lp(export_lp(one)) == one);

  std::mt19937_64 rng(1);
  const MilpProblem p = testgen::random_problem(rng, 12, 15, 5);
  const std::string text = export_lp(p);
  CHECK(parse_lp(text) == p);
  CHECK(export_lp(parse_lp(text)) == text);
}

TEST_CASE("lp format: free columns, long rows and wrapped lines") {
  MilpProblem p;
  std::vector<Term> terms;
  for (int j = 0; j < 60; ++j) {
    terms.push_back({p.add_continuous("column_" + std::to_string(j), -kInfinity, kInfinity, -0.1 * j), 0.7 + j});
  }
  p.add_row("long", terms, RowSense::kLessEqual, 10.0);
  const std::string text = export_lp(p);
  for (std::size_t start = 0, end; (end = text.find('\n', start)) != std::string::npos; start = end + 1) {
    CHECK(end - start < 256);
  }
  CHECK(parse_lp(text) == p);
}

TEST_CASE("lp format: sanitized name collision") {
  MilpProblem p;
  p.add_continuous("x[1]");
  p.add_continuous("x_1_");
  CHECK_THROWS_AS(export_lp(p), Error);
  CHECK(sanitize_lp_name("1abc") == "_1abc");
  CHECK(sanitize_lp_name("e12") == "_e12");
  CHECK(sanitize_lp_name("earth") == "earth");
}

TEST_CASE("solution import") {
  const MilpProblem p = knapsack();
  const SolveResult best = solve_milp(p);
  const SolveResult back = import_solution(export_solution(p, best.values), p);
  CHECK(back.values == best.values);
  CHECK(back.objective == best.objective);

  const SolveResult sparse = import_solution("a 1\n", p);
  CHECK(sparse.values == std::vector<double>{1.0, 0.0, 0.0});
  CHECK(sparse.warnings.size() >= 2);

  try {
    import_solution("a 1\nb 1\nc 1\n", p);
    FAIL("expected InfeasibleImport");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInfeasibleImport);
    CHECK(std::string(e.what()).find("weight") != std::string::npos);
  }
}
