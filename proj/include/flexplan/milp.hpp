#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace flexplan {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class ColumnKind { kContinuous, kBinary };
enum class RowSense { kLessEqual, kEqual, kGreaterEqual };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::kContinuous;
  double lower = 0.0;
  double upper = kInfinity;
  double objective = 0.0;

  bool operator==(const Column&) const = default;
};

struct Term {
  int column = 0;
  double coefficient = 0.0;

  bool operator==(const Term&) const = default;
};

struct Row {
  std::string name;
  std::vector<Term> terms;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;

  bool operator==(const Row&) const = default;
};

// Minimization problem over continuous and binary columns. Mutable while it
// is being assembled; the solvers only read it.
class MilpProblem {
 public:
  int add_column(std::string name, ColumnKind kind, double lower, double upper,
                 double objective = 0.0);
  int add_continuous(std::string name, double lower = 0.0,
                     double upper = kInfinity, double objective = 0.0) {
    return add_column(std::move(name), ColumnKind::kContinuous, lower, upper,
                      objective);
  }
  int add_binary(std::string name, double objective = 0.0) {
    return add_column(std::move(name), ColumnKind::kBinary, 0.0, 1.0, objective);
  }

  // Duplicate column references inside `terms` are merged; zero coefficients
  // are dropped.
  int add_row(std::string name, std::vector<Term> terms, RowSense sense,
              double rhs);

  void set_bounds(int column, double lower, double upper);
  void set_objective(int column, double coefficient);
  void add_objective(int column, double coefficient);

  std::size_t num_columns() const { return columns_.size(); }
  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_binaries() const;
  const Column& column(int j) const { return columns_[static_cast<std::size_t>(j)]; }
  const Row& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<Row>& rows() const { return rows_; }

  std::optional<int> find_column(std::string_view name) const;
  std::optional<int> find_row(std::string_view name) const;

  double objective_value(std::span<const double> x) const;
  double row_activity(int row, std::span<const double> x) const;
  // Largest violation of any row or column bound by `x`; reports the row
  // index (or -1 for a bound) through `worst_row` when given.
  double max_violation(std::span<const double> x, int* worst_row = nullptr) const;

  bool operator==(const MilpProblem& other) const {
    return columns_ == other.columns_ && rows_ == other.rows_;
  }

 private:
  std::vector<Column> columns_;
  std::vector<Row> rows_;
  std::unordered_map<std::string, int> column_index_;
  std::unordered_map<std::string, int> row_index_;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kGapLimit, kIterationLimit };

std::string_view status_name(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;  // indexed by column
  double bound = -kInfinity;   // best dual bound (minimization)
  double gap = kInfinity;      // relative
  long iterations = 0;         // simplex pivots, all nodes
  long nodes = 0;              // branch-and-bound nodes solved below the root
  std::vector<std::string> warnings;

  bool has_solution() const {
    return status == SolveStatus::kOptimal || status == SolveStatus::kGapLimit ||
           (status == SolveStatus::kIterationLimit && !values.empty());
  }
  double value(int column) const { return values[static_cast<std::size_t>(column)]; }
};

enum class KernelMode { kSerial, kParallel };

// kMostFractional is the reference rule. kPenalty scores each fractional
// binary by the product of its dual penalties (lowest index on ties) and
// lifts each child's bound by its penalty.
enum class BranchRule { kMostFractional, kPenalty };

struct SolverOptions {
  double time_limit_seconds = kInfinity;
  double gap_limit = 1e-6;
  long max_nodes = 2'000'000;
  long max_iterations = 50'000'000;
  KernelMode kernel = KernelMode::kSerial;
  BranchRule branching = BranchRule::kMostFractional;
  // Memory ceiling for tableau snapshots kept to warm-start child nodes.
  std::size_t warm_start_budget_bytes = std::size_t{1} << 30;
  // Optional primal heuristic: given a node's relaxation values, proposes
  // values for the binaries (other entries are ignored). The proposal is
  // fixed and the continuous part re-solved. Runs at the root and every
  // `heuristic_interval` nodes.
  std::function<std::optional<std::vector<double>>(const std::vector<double>&)> heuristic;
  long heuristic_interval = 100;
  // Binary assignments tried at the root before branching, indexed by
  // column; entries of other columns are ignored.
  std::vector<std::vector<double>> start_points;
};

// Solves the continuous relaxation (binaries relaxed to [lower, upper]).
SolveResult solve_lp(const MilpProblem& problem, const SolverOptions& options = {});

// Best-bound branch and bound over solve_lp relaxations. By default branches
// on the most fractional binary, ties broken by lowest column index.
SolveResult solve_milp(const MilpProblem& problem, const SolverOptions& options = {});

}  // namespace flexplan
