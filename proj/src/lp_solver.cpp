#include "flexplan/lp_solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "flexplan/tableau_kernels.hpp"

namespace flexplan {
namespace {

double pow2_round(double s) {
  if (!std::isfinite(s) || s <= 0.0) return 1.0;
  return std::ldexp(1.0, static_cast<int>(std::lround(std::log2(s))));
}

}  // namespace

DenseSimplex::DenseSimplex(const MilpProblem& problem, SimplexOptions options)
    : options_(options) {
  build(problem);
}

void DenseSimplex::compute_scaling(const MilpProblem& problem) {
  row_scale_.assign(m_, 1.0);
  col_scale_.assign(n_, 1.0);
  // Geometric scaling passes followed by row max-norm equilibration; every
  // factor is a power of two so scaling itself adds no rounding error.
  for (int pass = 0; pass < 4; ++pass) {
    for (std::size_t i = 0; i < m_; ++i) {
      double lo = kInfinity, hi = 0.0;
      for (const Term& t : problem.row(static_cast<int>(i)).terms) {
        const double v = std::abs(t.coefficient) * col_scale_[static_cast<std::size_t>(t.column)];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi > 0.0) row_scale_[i] = 1.0 / std::sqrt(lo * hi);
    }
    std::vector<double> lo(n_, kInfinity), hi(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      for (const Term& t : problem.row(static_cast<int>(i)).terms) {
        const auto j = static_cast<std::size_t>(t.column);
        const double v = std::abs(t.coefficient) * row_scale_[i];
        lo[j] = std::min(lo[j], v);
        hi[j] = std::max(hi[j], v);
      }
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (hi[j] > 0.0) col_scale_[j] = 1.0 / std::sqrt(lo[j] * hi[j]);
    }
  }
  for (std::size_t j = 0; j < n_; ++j) col_scale_[j] = pow2_round(col_scale_[j]);
  for (std::size_t i = 0; i < m_; ++i) {
    double hi = 0.0;
    for (const Term& t : problem.row(static_cast<int>(i)).terms) {
      hi = std::max(hi, std::abs(t.coefficient) * col_scale_[static_cast<std::size_t>(t.column)]);
    }
    row_scale_[i] = hi > 0.0 ? pow2_round(1.0 / hi) : 1.0;
  }
  double cmax = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    cmax = std::max(cmax, std::abs(problem.column(static_cast<int>(j)).objective) * col_scale_[j]);
  }
  obj_scale_ = cmax > 0.0 ? pow2_round(1.0 / cmax) : 1.0;
}

void DenseSimplex::build(const MilpProblem& problem) {
  m_ = problem.num_rows();
  n_ = problem.num_columns();
  total_ = n_ + m_;
  compute_scaling(problem);

  columns_.assign(n_, {});
  rhs_.assign(m_, 0.0);
  senses_.assign(m_, RowSense::kLessEqual);
  row_norm_.assign(m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) {
    const Row& row = problem.row(static_cast<int>(i));
    senses_[i] = row.sense;
    rhs_[i] = row.rhs * row_scale_[i];
    for (const Term& t : row.terms) {
      const auto j = static_cast<std::size_t>(t.column);
      columns_[j].emplace_back(static_cast<std::uint32_t>(i),
                               t.coefficient * row_scale_[i] * col_scale_[j]);
      row_norm_[i] = std::max(row_norm_[i], std::abs(t.coefficient));
    }
  }

  cost_.assign(total_, 0.0);
  orig_cost_.assign(n_, 0.0);
  lower_.assign(total_, 0.0);
  upper_.assign(total_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const Column& c = problem.column(static_cast<int>(j));
    orig_cost_[j] = c.objective;
    cost_[j] = c.objective * col_scale_[j] * obj_scale_;
    lower_[j] = c.lower / col_scale_[j];
    upper_[j] = c.upper / col_scale_[j];
  }
  for (std::size_t i = 0; i < m_; ++i) {
    const std::size_t s = n_ + i;
    switch (senses_[i]) {
      case RowSense::kLessEqual: lower_[s] = 0.0; upper_[s] = kInfinity; break;
      case RowSense::kGreaterEqual: lower_[s] = -kInfinity; upper_[s] = 0.0; break;
      case RowSense::kEqual: lower_[s] = 0.0; upper_[s] = 0.0; break;
    }
  }
  initialize_slack_basis();
}

void DenseSimplex::initialize_slack_basis() {
  tab_.assign(m_ * total_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    for (const auto& [i, a] : columns_[j]) tab_[i * total_ + j] = a;
  }
  for (std::size_t i = 0; i < m_; ++i) tab_[i * total_ + n_ + i] = 1.0;

  basis_.resize(m_);
  state_.assign(total_, VarState::kLower);
  position_.assign(total_, -1);
  x_.assign(total_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    if (std::isfinite(lower_[j])) {
      state_[j] = VarState::kLower;
      x_[j] = lower_[j];
    } else if (std::isfinite(upper_[j])) {
      state_[j] = VarState::kUpper;
      x_[j] = upper_[j];
    } else {
      state_[j] = VarState::kFree;
      x_[j] = 0.0;
    }
  }
  for (std::size_t i = 0; i < m_; ++i) {
    basis_[i] = static_cast<std::uint32_t>(n_ + i);
    state_[n_ + i] = VarState::kBasic;
    position_[n_ + i] = static_cast<std::int32_t>(i);
  }
  refresh();
}

std::size_t DenseSimplex::memory_bytes() const {
  return tab_.size() * sizeof(double) + total_ * (4 * sizeof(double) + 8);
}

double DenseSimplex::infeasibility(std::size_t row) const {
  const std::size_t b = basis_[row];
  if (x_[b] < lower_[b]) return lower_[b] - x_[b];
  if (x_[b] > upper_[b]) return x_[b] - upper_[b];
  return 0.0;
}

bool DenseSimplex::primal_feasible() const {
  for (std::size_t i = 0; i < m_; ++i) {
    if (infeasibility(i) > options_.feasibility_tolerance) return false;
  }
  return true;
}

bool DenseSimplex::dual_feasible() const {
  const double tol = options_.optimality_tolerance;
  for (std::size_t j = 0; j < total_; ++j) {
    if (is_fixed(j)) continue;
    switch (state_[j]) {
      case VarState::kBasic: break;
      case VarState::kLower: if (d_[j] < -tol) return false; break;
      case VarState::kUpper: if (d_[j] > tol) return false; break;
      case VarState::kFree: if (std::abs(d_[j]) > tol) return false; break;
    }
  }
  return true;
}

void DenseSimplex::refresh() {
  // x_B = B^-1 (b - N x_N); the slack block of the tableau holds B^-1.
  std::vector<double> v(rhs_);
  for (std::size_t j = 0; j < n_; ++j) {
    if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
    for (const auto& [i, a] : columns_[j]) v[i] -= a * x_[j];
  }
  for (std::size_t i = 0; i < m_; ++i) {
    const std::size_t s = n_ + i;
    if (state_[s] != VarState::kBasic) v[i] -= x_[s];
  }
  for (std::size_t r = 0; r < m_; ++r) {
    const double* row = row_ptr(r);
    double acc = 0.0;
    for (std::size_t k = 0; k < m_; ++k) acc += row[n_ + k] * v[k];
    x_[basis_[r]] = acc;
  }

  std::vector<double> cb(m_);
  for (std::size_t r = 0; r < m_; ++r) cb[r] = cost_[basis_[r]];
  d_.assign(total_, 0.0);
  kernels::weighted_row_sum(options_.kernel, tab_, total_, cb, d_);
  for (std::size_t j = 0; j < total_; ++j) d_[j] = cost_[j] - d_[j];
  for (std::size_t r = 0; r < m_; ++r) d_[basis_[r]] = 0.0;
  since_refresh_ = 0;
}

void DenseSimplex::pivot(std::size_t row, std::size_t col) {
  const double* prow = row_ptr(row);
  support_.clear();
  for (std::size_t j = 0; j < total_; ++j) {
    if (prow[j] != 0.0) support_.push_back(static_cast<std::uint32_t>(j));
  }
  kernels::pivot(options_.kernel, tab_, total_, row, col, support_);

  const double dq = d_[col];
  if (dq != 0.0) {
    const double* nrow = row_ptr(row);
    for (std::uint32_t j : support_) d_[j] -= dq * nrow[j];
  }
  d_[col] = 0.0;

  const std::size_t leaving = basis_[row];
  position_[leaving] = -1;
  basis_[row] = static_cast<std::uint32_t>(col);
  position_[col] = static_cast<std::int32_t>(row);
  state_[col] = VarState::kBasic;
  ++iterations_;
  if (++since_refresh_ >= options_.refresh_interval) refresh();
}

void DenseSimplex::note_pivot(double step) {
  if (step <= 1e-12) {
    if (++degenerate_run_ >= options_.degenerate_limit) bland_ = true;
  } else {
    degenerate_run_ = 0;
    bland_ = false;
  }
}

DenseSimplex::StepResult DenseSimplex::primal_step(bool phase_one) {
  const double opt_tol = options_.optimality_tolerance;
  const double feas_tol = options_.feasibility_tolerance;
  const double piv_tol = options_.pivot_tolerance;

  // Pricing vector: phase-two reduced costs, or the gradient of the sum of
  // infeasibilities in phase one.
  std::vector<double>& price = phase_one ? scratch_ : d_;
  if (phase_one) {
    std::vector<double> w(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = basis_[i];
      if (x_[b] < lower_[b] - feas_tol) w[i] = -1.0;
      else if (x_[b] > upper_[b] + feas_tol) w[i] = 1.0;
    }
    scratch_.assign(total_, 0.0);
    kernels::weighted_row_sum(options_.kernel, tab_, total_, w, scratch_);
    for (double& v : scratch_) v = -v;
  }

  std::size_t entering = total_;
  int direction = 0;
  double best = 0.0;
  for (std::size_t j = 0; j < total_; ++j) {
    const VarState s = state_[j];
    if (s == VarState::kBasic || is_fixed(j)) continue;
    const double dj = price[j];
    int dir = 0;
    if ((s == VarState::kLower || s == VarState::kFree) && dj < -opt_tol) dir = 1;
    else if ((s == VarState::kUpper || s == VarState::kFree) && dj > opt_tol) dir = -1;
    if (dir == 0) continue;
    if (bland_) {
      entering = j;
      direction = dir;
      break;
    }
    if (std::abs(dj) > best) {
      best = std::abs(dj);
      entering = j;
      direction = dir;
    }
  }
  if (entering == total_) return phase_one ? StepResult::kStalled : StepResult::kOptimal;

  const std::size_t q = entering;
  // Harris two-pass ratio test: first the relaxed step bound, then the most
  // stable pivot among rows that block within it.
  double relaxed = (std::isfinite(upper_[q]) && std::isfinite(lower_[q]))
                       ? upper_[q] - lower_[q]
                       : kInfinity;
  auto row_limit = [&](std::size_t i, double delta, double tol, double& target) {
    const std::size_t b = basis_[i];
    const double xb = x_[b];
    if (phase_one) {
      if (xb < lower_[b] - feas_tol) {
        if (delta > 0.0) { target = lower_[b]; return (lower_[b] - xb + tol) / delta; }
        return kInfinity;
      }
      if (xb > upper_[b] + feas_tol) {
        if (delta < 0.0) { target = upper_[b]; return (xb - upper_[b] + tol) / -delta; }
        return kInfinity;
      }
    }
    if (delta < 0.0 && std::isfinite(lower_[b])) {
      target = lower_[b];
      return (xb - lower_[b] + tol) / -delta;
    }
    if (delta > 0.0 && std::isfinite(upper_[b])) {
      target = upper_[b];
      return (upper_[b] - xb + tol) / delta;
    }
    return kInfinity;
  };

  double target = 0.0;
  for (std::size_t i = 0; i < m_; ++i) {
    const double a = tab(i, q);
    if (std::abs(a) < piv_tol) continue;
    const double t = row_limit(i, -direction * a, feas_tol, target);
    relaxed = std::min(relaxed, t);
  }
  if (!std::isfinite(relaxed)) {
    return phase_one ? StepResult::kStalled : StepResult::kUnbounded;
  }

  std::size_t leave_row = m_;
  double leave_target = 0.0;
  double step = kInfinity;
  double best_pivot = 0.0;
  for (std::size_t i = 0; i < m_; ++i) {
    const double a = tab(i, q);
    if (std::abs(a) < piv_tol) continue;
    double tgt = 0.0;
    const double t_exact = row_limit(i, -direction * a, 0.0, tgt);
    if (t_exact > relaxed) continue;
    const bool better =
        bland_ ? (leave_row == m_ || basis_[i] < basis_[leave_row])
               : std::abs(a) > best_pivot;
    if (better) {
      best_pivot = std::abs(a);
      leave_row = i;
      leave_target = tgt;
      step = std::max(0.0, t_exact);
    }
  }

  const bool bound_flip = (leave_row == m_) ||
                          (std::isfinite(upper_[q]) && std::isfinite(lower_[q]) &&
                           upper_[q] - lower_[q] <= step);
  if (bound_flip) {
    step = upper_[q] - lower_[q];
  }
  if (step > 0.0) {
    const double move = direction * step;
    x_[q] += move;
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = tab(i, q);
      if (a != 0.0) x_[basis_[i]] -= a * move;
    }
  }
  if (bound_flip) {
    x_[q] = direction > 0 ? upper_[q] : lower_[q];
    state_[q] = direction > 0 ? VarState::kUpper : VarState::kLower;
    ++iterations_;
    note_pivot(step);
    return StepResult::kContinue;
  }

  const std::size_t leaving = basis_[leave_row];
  x_[leaving] = leave_target;
  pivot(leave_row, q);
  state_[leaving] = (leave_target == lower_[leaving]) ? VarState::kLower : VarState::kUpper;
  note_pivot(step);
  return StepResult::kContinue;
}

LpStatus DenseSimplex::run_primal() {
  bland_ = false;
  degenerate_run_ = 0;
  while (true) {
    if (iterations_ >= options_.max_iterations) return LpStatus::kIterationLimit;
    if (primal_feasible()) break;
    if (primal_step(true) == StepResult::kStalled) {
      refresh();
      if (primal_feasible()) break;
      if (primal_step(true) == StepResult::kStalled) return LpStatus::kInfeasible;
    }
  }
  bland_ = false;
  degenerate_run_ = 0;
  while (true) {
    if (iterations_ >= options_.max_iterations) return LpStatus::kIterationLimit;
    const StepResult r = primal_step(false);
    if (r == StepResult::kOptimal) {
      refresh();
      if (!primal_feasible()) return run_primal();
      if (primal_step(false) == StepResult::kOptimal) return LpStatus::kOptimal;
    } else if (r == StepResult::kUnbounded) {
      return LpStatus::kUnbounded;
    }
  }
}

DenseSimplex::StepResult DenseSimplex::dual_step() {
  const double feas_tol = options_.feasibility_tolerance;
  const double piv_tol = options_.pivot_tolerance;

  std::size_t r = m_;
  double worst = feas_tol;
  for (std::size_t i = 0; i < m_; ++i) {
    const double v = infeasibility(i);
    if (v > worst) {
      worst = v;
      r = i;
    }
  }
  if (r == m_) return StepResult::kOptimal;

  const std::size_t leaving = basis_[r];
  const bool to_lower = x_[leaving] < lower_[leaving];
  const double target = to_lower ? lower_[leaving] : upper_[leaving];
  const double sign = to_lower ? 1.0 : -1.0;  // required direction of x_r
  const double* row = row_ptr(r);

  std::size_t q = total_;
  double best_ratio = kInfinity;
  double best_pivot = 0.0;
  for (std::size_t j = 0; j < total_; ++j) {
    const VarState s = state_[j];
    if (s == VarState::kBasic || is_fixed(j)) continue;
    const double a = row[j];
    if (std::abs(a) < piv_tol) continue;
    // Moving x_j by delta changes x_r by -a * delta.
    bool eligible = false;
    if (s == VarState::kLower) eligible = a * sign < 0.0;
    else if (s == VarState::kUpper) eligible = a * sign > 0.0;
    else eligible = true;
    if (!eligible) continue;
    const double ratio = std::max(0.0, std::abs(d_[j])) / std::abs(a);
    const bool better = ratio < best_ratio - 1e-12 ||
                        (ratio <= best_ratio + 1e-12 && !bland_ && std::abs(a) > best_pivot);
    if (better) {
      best_ratio = ratio;
      best_pivot = std::abs(a);
      q = j;
    }
  }
  if (q == total_) return StepResult::kStalled;

  const double delta = (x_[leaving] - target) / row[q];
  x_[q] += delta;
  for (std::size_t i = 0; i < m_; ++i) {
    const double a = tab(i, q);
    if (a != 0.0) x_[basis_[i]] -= a * delta;
  }
  x_[leaving] = target;
  pivot(r, q);
  state_[leaving] = to_lower ? VarState::kLower : VarState::kUpper;
  note_pivot(best_ratio);
  return StepResult::kContinue;
}

LpStatus DenseSimplex::run_dual() {
  bland_ = false;
  degenerate_run_ = 0;
  while (true) {
    if (iterations_ >= options_.max_iterations) return LpStatus::kIterationLimit;
    const StepResult r = dual_step();
    if (r == StepResult::kOptimal) break;
    if (r == StepResult::kStalled) {
      refresh();
      if (dual_step() == StepResult::kStalled) return LpStatus::kInfeasible;
    }
  }
  // Clean up any reduced-cost drift with primal iterations.
  return run_primal();
}

LpStatus DenseSimplex::solve() {
  LpStatus status = run_primal();
  if (status == LpStatus::kOptimal && certified_violation() > 1e-7) {
    if (refactor()) status = run_primal();
  }
  return status;
}

LpStatus DenseSimplex::reoptimize() {
  if (primal_feasible()) return solve();
  LpStatus status = dual_feasible() ? run_dual() : run_primal();
  if (status == LpStatus::kOptimal && certified_violation() > 1e-7) {
    if (refactor()) status = run_primal();
  }
  return status;
}

void DenseSimplex::set_column_bounds(int column, double lower, double upper) {
  const auto j = static_cast<std::size_t>(column);
  lower_[j] = lower / col_scale_[j];
  upper_[j] = upper / col_scale_[j];
  if (state_[j] == VarState::kBasic) return;

  double target = 0.0;
  VarState s = VarState::kFree;
  const bool lo = std::isfinite(lower_[j]);
  const bool hi = std::isfinite(upper_[j]);
  if (state_[j] == VarState::kUpper && hi) {
    target = upper_[j];
    s = VarState::kUpper;
  } else if (lo) {
    target = lower_[j];
    s = VarState::kLower;
  } else if (hi) {
    target = upper_[j];
    s = VarState::kUpper;
  }
  const double delta = target - x_[j];
  if (delta != 0.0) {
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = tab(i, j);
      if (a != 0.0) x_[basis_[i]] -= a * delta;
    }
  }
  x_[j] = target;
  state_[j] = s;
}

std::pair<double, double> DenseSimplex::branching_penalties(int column, double down, double up) const {
  const auto j = static_cast<std::size_t>(column);
  const std::int32_t r = position_[j];
  if (r < 0) return {0.0, 0.0};
  const double* row = row_ptr(static_cast<std::size_t>(r));
  // sign is the direction x_j must move.
  auto penalty = [&](double target, double sign) {
    const double shift = std::abs(x_[j] - target);
    if (shift <= 0.0) return 0.0;
    double best = kInfinity;
    for (std::size_t k = 0; k < total_; ++k) {
      const VarState s = state_[k];
      if (s == VarState::kBasic || is_fixed(k)) continue;
      const double a = row[k];
      if (std::abs(a) < options_.pivot_tolerance) continue;
      bool eligible = s == VarState::kFree;
      if (s == VarState::kLower) eligible = a * sign < 0.0;
      else if (s == VarState::kUpper) eligible = a * sign > 0.0;
      if (eligible) best = std::min(best, std::abs(d_[k]) / std::abs(a));
    }
    return best == kInfinity ? kInfinity : shift * best / obj_scale_;
  };
  return {penalty(down / col_scale_[j], -1.0), penalty(up / col_scale_[j], 1.0)};
}

std::vector<double> DenseSimplex::column_values() const {
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = x_[j] * col_scale_[j];
  return out;
}

double DenseSimplex::objective_value() const {
  double total = 0.0;
  for (std::size_t j = 0; j < n_; ++j) total += orig_cost_[j] * x_[j] * col_scale_[j];
  return total;
}

double DenseSimplex::certified_violation() const {
  // Row residuals in original units, normalized by each row's largest
  // coefficient, plus bound violations.
  std::vector<double> activity(m_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const double xj = x_[j];
    if (xj == 0.0) continue;
    for (const auto& [i, a] : columns_[j]) activity[i] += a * xj;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < m_; ++i) {
    const double slack = rhs_[i] - activity[i];
    double v = 0.0;
    switch (senses_[i]) {
      case RowSense::kLessEqual: v = -slack; break;
      case RowSense::kGreaterEqual: v = slack; break;
      case RowSense::kEqual: v = std::abs(slack); break;
    }
    worst = std::max(worst, v);
  }
  for (std::size_t j = 0; j < n_; ++j) {
    worst = std::max({worst, lower_[j] - x_[j], x_[j] - upper_[j]});
  }
  return worst;
}

double DenseSimplex::dual_bound() const {
  // y = c_B B^-1, then reduced costs against the original scaled columns.
  std::vector<double> y(m_, 0.0);
  for (std::size_t r = 0; r < m_; ++r) {
    const double cb = cost_[basis_[r]];
    if (cb == 0.0) continue;
    const double* row = row_ptr(r);
    for (std::size_t k = 0; k < m_; ++k) y[k] += cb * row[n_ + k];
  }
  const double tol = options_.optimality_tolerance;
  double bound = 0.0;
  for (std::size_t i = 0; i < m_; ++i) bound += y[i] * rhs_[i];
  auto add_term = [&](double dj, double lo, double hi) {
    if (std::abs(dj) <= tol) return;
    const double at = dj > 0.0 ? lo : hi;
    if (!std::isfinite(at)) {
      bound = -kInfinity;
      return;
    }
    bound += dj * at;
  };
  for (std::size_t j = 0; j < n_; ++j) {
    double dj = cost_[j];
    for (const auto& [i, a] : columns_[j]) dj -= y[i] * a;
    add_term(dj, lower_[j], upper_[j]);
  }
  for (std::size_t i = 0; i < m_; ++i) add_term(-y[i], lower_[n_ + i], upper_[n_ + i]);
  return bound / obj_scale_;
}

bool DenseSimplex::refactor() {
  // Invert B by Gauss-Jordan with partial pivoting.
  std::vector<double> binv(m_ * m_, 0.0);
  std::vector<double> b(m_ * m_, 0.0);
  for (std::size_t r = 0; r < m_; ++r) {
    const std::size_t v = basis_[r];
    if (v < n_) {
      for (const auto& [i, a] : columns_[v]) b[i * m_ + r] = a;
    } else {
      b[(v - n_) * m_ + r] = 1.0;
    }
    binv[r * m_ + r] = 1.0;
  }
  for (std::size_t c = 0; c < m_; ++c) {
    std::size_t p = c;
    double pv = std::abs(b[c * m_ + c]);
    for (std::size_t i = c + 1; i < m_; ++i) {
      if (std::abs(b[i * m_ + c]) > pv) {
        pv = std::abs(b[i * m_ + c]);
        p = i;
      }
    }
    if (pv < 1e-12) {
      initialize_slack_basis();
      return false;
    }
    if (p != c) {
      for (std::size_t k = 0; k < m_; ++k) {
        std::swap(b[p * m_ + k], b[c * m_ + k]);
        std::swap(binv[p * m_ + k], binv[c * m_ + k]);
      }
    }
    const double inv = 1.0 / b[c * m_ + c];
    for (std::size_t k = 0; k < m_; ++k) {
      b[c * m_ + k] *= inv;
      binv[c * m_ + k] *= inv;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == c) continue;
      const double f = b[i * m_ + c];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < m_; ++k) {
        b[i * m_ + k] -= f * b[c * m_ + k];
        binv[i * m_ + k] -= f * binv[c * m_ + k];
      }
    }
  }
  // Row r of B^-1 belongs to the basic variable in basis position r.
  std::fill(tab_.begin(), tab_.end(), 0.0);
  for (std::size_t r = 0; r < m_; ++r) {
    double* row = row_ptr(r);
    const double* inv_row = binv.data() + r * m_;
    for (std::size_t j = 0; j < n_; ++j) {
      double acc = 0.0;
      for (const auto& [i, a] : columns_[j]) acc += inv_row[i] * a;
      row[j] = acc;
    }
    for (std::size_t k = 0; k < m_; ++k) row[n_ + k] = inv_row[k];
  }
  refresh();
  return true;
}

}  // namespace flexplan
