#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>

#include "flexplan/lp_solver.hpp"
#include "flexplan/milp.hpp"

namespace flexplan {
namespace {

constexpr double kIntegralityTolerance = 1e-6;

SimplexOptions simplex_options(const SolverOptions& options) {
  SimplexOptions s;
  s.kernel = options.kernel;
  s.max_iterations = options.max_iterations;
  return s;
}

SolveStatus to_solve_status(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return SolveStatus::kOptimal;
    case LpStatus::kInfeasible: return SolveStatus::kInfeasible;
    case LpStatus::kUnbounded: return SolveStatus::kUnbounded;
    case LpStatus::kIterationLimit: return SolveStatus::kIterationLimit;
  }
  return SolveStatus::kInfeasible;
}

double relative_gap(double incumbent, double bound) {
  if (!std::isfinite(incumbent)) return kInfinity;
  if (!std::isfinite(bound)) return kInfinity;
  return std::abs(incumbent - bound) / std::max(1.0, std::abs(incumbent));
}

struct BoundChange {
  int column;
  double lower;
  double upper;
};

// Snapshots are shared by both children of a node; the counter tracks the
// bytes held by live snapshots so the tree stays under the memory budget.
struct Snapshot {
  Snapshot(const DenseSimplex& s, std::atomic<std::size_t>& counter)
      : simplex(s), bytes(s.memory_bytes()), held(counter) {
    held += bytes;
  }
  ~Snapshot() { held -= bytes; }
  DenseSimplex simplex;
  std::size_t bytes;
  std::atomic<std::size_t>& held;
};

struct Node {
  long id = 0;
  int depth = 0;
  double bound = -kInfinity;
  // Branch that created this node, for pseudocost updates.
  int column = -1;
  int side = 0;
  double shift = 0.0;
  double parent_objective = 0.0;
  std::vector<BoundChange> changes;
  std::shared_ptr<const Snapshot> warm;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    // Equal bounds dive first; otherwise ties spread the tree breadth-first.
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

// Most fractional binary, lowest index on ties; -1 when integral.
int branching_column(const MilpProblem& problem, const std::vector<double>& x) {
  int best = -1;
  double best_frac = kIntegralityTolerance;
  for (std::size_t j = 0; j < problem.num_columns(); ++j) {
    if (problem.column(static_cast<int>(j)).kind != ColumnKind::kBinary) continue;
    const double f = std::abs(x[j] - std::round(x[j]));
    if (f > best_frac + 1e-12) {
      best_frac = f;
      best = static_cast<int>(j);
    }
  }
  return best;
}

struct Branch {
  int column = -1;
  double down_bound = 0.0;  // objective increase lower bounds per child
  double up_bound = 0.0;
};

// Observed objective gain per unit shift, by column and side.
struct Pseudocosts {
  std::vector<std::array<double, 2>> sum;
  std::vector<std::array<int, 2>> count;
  explicit Pseudocosts(std::size_t n) : sum(n, {0.0, 0.0}), count(n, {0, 0}) {}
  void record(int column, int side, double gain_per_unit) {
    sum[static_cast<std::size_t>(column)][static_cast<std::size_t>(side)] += gain_per_unit;
    ++count[static_cast<std::size_t>(column)][static_cast<std::size_t>(side)];
  }
  double estimate(std::size_t column, int side) const {
    const auto s = static_cast<std::size_t>(side);
    return count[column][s] > 0 ? sum[column][s] / count[column][s] : 0.0;
  }
};

Branch choose_branch(const MilpProblem& problem, const DenseSimplex& simplex, const std::vector<double>& x,
                     const SolverOptions& options, const Pseudocosts& pc) {
  if (options.branching == BranchRule::kMostFractional) return {branching_column(problem, x), 0.0, 0.0};
  Branch best;
  double best_score = -1.0;
  for (std::size_t j = 0; j < problem.num_columns(); ++j) {
    if (problem.column(static_cast<int>(j)).kind != ColumnKind::kBinary) continue;
    const double f = std::abs(x[j] - std::round(x[j]));
    if (f <= kIntegralityTolerance) continue;
    const auto [down, up] = simplex.branching_penalties(static_cast<int>(j), std::floor(x[j]), std::ceil(x[j]));
    const double fd = x[j] - std::floor(x[j]);
    const double est_down = std::max(down, pc.estimate(j, 0) * fd);
    const double est_up = std::max(up, pc.estimate(j, 1) * (1.0 - fd));
    const double score = std::max(est_down, 1e-6) * std::max(est_up, 1e-6);
    if (score > best_score * (1.0 + 1e-9)) {
      best_score = score;
      best = {static_cast<int>(j), down, up};
    }
  }
  return best;
}

}  // namespace

SolveResult solve_lp(const MilpProblem& problem, const SolverOptions& options) {
  DenseSimplex simplex(problem, simplex_options(options));
  const LpStatus status = simplex.solve();
  SolveResult result;
  result.status = to_solve_status(status);
  result.iterations = simplex.iterations();
  if (status == LpStatus::kOptimal) {
    result.values = simplex.column_values();
    result.objective = problem.objective_value(result.values);
    result.bound = std::min(result.objective, simplex.dual_bound());
    result.gap = relative_gap(result.objective, result.bound);
    if (result.gap < 1e-7) result.gap = 0.0;
  }
  return result;
}

SolveResult solve_milp(const MilpProblem& problem, const SolverOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };

  SolveResult result;
  DenseSimplex root(problem, simplex_options(options));
  const LpStatus root_status = root.solve();
  long iterations = root.iterations();
  if (root_status != LpStatus::kOptimal) {
    result.status = to_solve_status(root_status);
    result.iterations = iterations;
    return result;
  }

  std::vector<double> incumbent;
  double incumbent_value = kInfinity;
  auto consider = [&](const std::vector<double>& x) {
    std::vector<double> y = x;
    for (std::size_t j = 0; j < problem.num_columns(); ++j) {
      if (problem.column(static_cast<int>(j)).kind == ColumnKind::kBinary) y[j] = std::round(y[j]);
    }
    if (problem.max_violation(y) > 1e-6) return;
    const double v = problem.objective_value(y);
    if (v < incumbent_value) {
      incumbent_value = v;
      incumbent = std::move(y);
    }
  };
  // Fixes every binary at its rounded value and reoptimizes the continuous
  // part, which removes drift left by the relaxation.
  auto polish = [&](const DenseSimplex& from, const std::vector<double>& x) {
    DenseSimplex s = from;
    for (std::size_t j = 0; j < problem.num_columns(); ++j) {
      if (problem.column(static_cast<int>(j)).kind != ColumnKind::kBinary) continue;
      const double v = std::round(x[j]);
      s.set_column_bounds(static_cast<int>(j), v, v);
    }
    const long before = s.iterations();
    const LpStatus st = s.reoptimize();
    iterations += s.iterations() - before;
    if (st == LpStatus::kOptimal) consider(s.column_values());
    else consider(x);
  };

  std::atomic<std::size_t> held{0};
  const auto root_snapshot = std::make_shared<const Snapshot>(root, held);
  for (const std::vector<double>& guess : options.start_points) {
    if (guess.size() == problem.num_columns()) polish(root, guess);
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  Node root_node;
  root_node.id = next_id++;
  root_node.bound = root.objective_value();
  open.push(std::move(root_node));
  Pseudocosts pseudocosts(problem.num_columns());
  long nodes = 0;
  bool first = true;
  bool limit_hit = false;
  double global_bound = root.objective_value();

  while (!open.empty()) {
    global_bound = std::min(open.top().bound, incumbent_value);
    if (relative_gap(incumbent_value, global_bound) <= options.gap_limit) break;
    if (nodes >= options.max_nodes || iterations >= options.max_iterations ||
        elapsed() > options.time_limit_seconds) {
      limit_hit = true;
      break;
    }

    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent_value - options.gap_limit * std::max(1.0, std::abs(incumbent_value))) {
      continue;
    }

    DenseSimplex simplex = first ? root : (node.warm ? node.warm->simplex : root_snapshot->simplex);
    double objective = root.objective_value();
    if (!first) {
      ++nodes;
      for (const BoundChange& c : node.changes) simplex.set_column_bounds(c.column, c.lower, c.upper);
      const long before = simplex.iterations();
      const LpStatus st = simplex.reoptimize();
      iterations += simplex.iterations() - before;
      if (st != LpStatus::kOptimal) continue;
      objective = simplex.objective_value();
      if (node.column >= 0 && node.shift > 0.0) {
        pseudocosts.record(node.column, node.side, std::max(objective - node.parent_objective, 0.0) / node.shift);
      }
      if (objective >= incumbent_value - options.gap_limit * std::max(1.0, std::abs(incumbent_value))) {
        continue;
      }
    }
    first = false;
    node.warm.reset();

    const std::vector<double> x = simplex.column_values();
    if (options.heuristic && (nodes == 0 || (options.heuristic_interval > 0 && nodes % options.heuristic_interval == 0))) {
      if (auto guess = options.heuristic(x)) polish(simplex, *guess);
      if (relative_gap(incumbent_value, std::min(objective, incumbent_value)) <= options.gap_limit) continue;
    }
    const Branch choice = choose_branch(problem, simplex, x, options, pseudocosts);
    const int branch = choice.column;
    if (branch < 0) {
      polish(simplex, x);
      continue;
    }

    std::shared_ptr<const Snapshot> snap;
    if (held.load() + simplex.memory_bytes() <= options.warm_start_budget_bytes) {
      snap = std::make_shared<const Snapshot>(simplex, held);
    }
    const double lo = problem.column(branch).lower;
    const double hi = problem.column(branch).upper;
    for (int side = 0; side < 2; ++side) {
      const double lift = side == 0 ? choice.down_bound : choice.up_bound;
      if (!std::isfinite(lift)) continue;
      Node child;
      child.id = next_id++;
      child.depth = node.depth + 1;
      child.bound = objective + lift;
      child.column = branch;
      child.side = side;
      child.shift = side == 0 ? x[static_cast<std::size_t>(branch)] - lo : hi - x[static_cast<std::size_t>(branch)];
      child.parent_objective = objective;
      child.changes = node.changes;
      child.changes.push_back(side == 0 ? BoundChange{branch, lo, 0.0} : BoundChange{branch, 1.0, hi});
      child.warm = snap;
      open.push(std::move(child));
    }
  }
  if (open.empty()) global_bound = incumbent_value;

  result.iterations = iterations;
  result.nodes = nodes;
  if (incumbent.empty()) {
    result.status = limit_hit ? SolveStatus::kIterationLimit : SolveStatus::kInfeasible;
    result.bound = global_bound;
    return result;
  }
  result.values = std::move(incumbent);
  result.objective = incumbent_value;
  result.bound = std::min(global_bound, incumbent_value);
  result.gap = relative_gap(incumbent_value, result.bound);
  if (limit_hit && result.gap > options.gap_limit) {
    result.status = SolveStatus::kGapLimit;
  } else {
    result.status = SolveStatus::kOptimal;
  }
  return result;
}

}  // namespace flexplan
