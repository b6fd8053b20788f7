#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "flexplan/milp.hpp"

namespace flexplan {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct SimplexOptions {
  double feasibility_tolerance = 1e-9;
  double optimality_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  long max_iterations = 5'000'000;
  // Primal values and reduced costs are recomputed from B^-1 this often.
  int refresh_interval = 64;
  // Consecutive degenerate pivots tolerated before switching to Bland's rule.
  int degenerate_limit = 50;
  KernelMode kernel = KernelMode::kSerial;
};

// Bounded-variable simplex on a dense, equilibrated tableau B^-1 [A I].
// Holds the full solver state, so copying an instance snapshots a basis for
// warm starts. Binary columns are treated as continuous within their bounds.
class DenseSimplex {
 public:
  DenseSimplex(const MilpProblem& problem, SimplexOptions options = {});

  // Two-phase primal simplex from the current basis.
  LpStatus solve();
  // After bound changes: dual simplex when the basis is still dual feasible,
  // otherwise falls back to the primal phases.
  LpStatus reoptimize();

  // Bounds are given in the problem's (unscaled) units.
  void set_column_bounds(int column, double lower, double upper);

  std::vector<double> column_values() const;
  double objective_value() const;
  // Lagrangian bound from duals recomputed against the original rows; equals
  // the objective at an optimal basis up to rounding.
  double dual_bound() const;

  // Lower bounds on the objective increase from forcing a basic column down
  // to `down` or up to `up`, taken from one dual ratio test on its row.
  // Infinity means that child is infeasible; zero for nonbasic columns.
  std::pair<double, double> branching_penalties(int column, double down, double up) const;
  long iterations() const { return iterations_; }
  std::size_t memory_bytes() const;
  std::size_t num_rows() const { return m_; }
  std::size_t num_columns() const { return n_; }

  // Rebuilds the tableau from the current basis by inverting B.
  bool refactor();

 private:
  enum class VarState : std::uint8_t { kBasic, kLower, kUpper, kFree };
  enum class StepResult { kContinue, kOptimal, kUnbounded, kStalled };

  void build(const MilpProblem& problem);
  void compute_scaling(const MilpProblem& problem);
  void initialize_slack_basis();

  double* row_ptr(std::size_t i) { return tab_.data() + i * total_; }
  const double* row_ptr(std::size_t i) const { return tab_.data() + i * total_; }
  double tab(std::size_t i, std::size_t j) const { return tab_[i * total_ + j]; }

  bool is_fixed(std::size_t j) const { return upper_[j] - lower_[j] <= 0.0; }
  double infeasibility(std::size_t row) const;
  bool primal_feasible() const;
  bool dual_feasible() const;

  StepResult primal_step(bool phase_one);
  StepResult dual_step();
  LpStatus run_primal();
  LpStatus run_dual();
  void pivot(std::size_t row, std::size_t col);
  void refresh();
  void note_pivot(double step);
  double certified_violation() const;

  SimplexOptions options_;
  std::size_t m_ = 0;      // rows
  std::size_t n_ = 0;      // structural columns
  std::size_t total_ = 0;  // n_ + m_

  std::vector<double> row_scale_;
  std::vector<double> col_scale_;
  double obj_scale_ = 1.0;

  // Scaled constraint data, kept for refreshes and refactorization.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> columns_;
  std::vector<double> rhs_;
  std::vector<double> cost_;        // scaled phase-two costs, size total_
  std::vector<double> orig_cost_;   // unscaled structural objective
  std::vector<RowSense> senses_;
  std::vector<double> row_norm_;    // unscaled row infinity norms

  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> tab_;
  std::vector<std::uint32_t> basis_;
  std::vector<VarState> state_;
  std::vector<std::int32_t> position_;
  std::vector<double> x_;
  std::vector<double> d_;

  std::vector<std::uint32_t> support_;
  std::vector<double> scratch_;

  long iterations_ = 0;
  int since_refresh_ = 0;
  int degenerate_run_ = 0;
  bool bland_ = false;
};

}  // namespace flexplan
