#include <algorithm>
#include <cmath>
#include <map>

#include "flexplan/errors.hpp"
#include "flexplan/milp.hpp"

namespace flexplan {

int MilpProblem::add_column(std::string name, ColumnKind kind, double lower,
                            double upper, double objective) {
  if (column_index_.count(name) != 0) {
    throw Error(ErrorKind::kNameCollision, "duplicate column name '" + name + "'");
  }
  if (kind == ColumnKind::kBinary &&
      (lower < 0.0 || upper > 1.0 || lower != std::floor(lower) ||
       upper != std::floor(upper))) {
    throw Error(ErrorKind::kValidationError,
                "binary column '" + name + "' must have integral bounds in [0,1]");
  }
  if (lower > upper) {
    throw Error(ErrorKind::kValidationError, "column '" + name + "' has lower > upper");
  }
  const int index = static_cast<int>(columns_.size());
  column_index_.emplace(name, index);
  columns_.push_back(Column{std::move(name), kind, lower, upper, objective});
  return index;
}

int MilpProblem::add_row(std::string name, std::vector<Term> terms,
                         RowSense sense, double rhs) {
  if (row_index_.count(name) != 0) {
    throw Error(ErrorKind::kNameCollision, "duplicate row name '" + name + "'");
  }
  // Merge duplicates while keeping first-appearance order.
  std::map<int, std::size_t> seen;
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const Term& t : terms) {
    if (t.column < 0 || static_cast<std::size_t>(t.column) >= columns_.size()) {
      throw Error(ErrorKind::kValidationError,
                  "row '" + name + "' references unknown column " +
                      std::to_string(t.column));
    }
    auto [it, inserted] = seen.emplace(t.column, merged.size());
    if (inserted) {
      merged.push_back(t);
    } else {
      merged[it->second].coefficient += t.coefficient;
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coefficient == 0.0; });

  const int index = static_cast<int>(rows_.size());
  row_index_.emplace(name, index);
  rows_.push_back(Row{std::move(name), std::move(merged), sense, rhs});
  return index;
}

void MilpProblem::set_bounds(int column, double lower, double upper) {
  Column& c = columns_.at(static_cast<std::size_t>(column));
  if (lower > upper) {
    throw Error(ErrorKind::kValidationError, "column '" + c.name + "' has lower > upper");
  }
  c.lower = lower;
  c.upper = upper;
}

void MilpProblem::set_objective(int column, double coefficient) {
  columns_.at(static_cast<std::size_t>(column)).objective = coefficient;
}

void MilpProblem::add_objective(int column, double coefficient) {
  columns_.at(static_cast<std::size_t>(column)).objective += coefficient;
}

std::size_t MilpProblem::num_binaries() const {
  return static_cast<std::size_t>(std::count_if(
      columns_.begin(), columns_.end(),
      [](const Column& c) { return c.kind == ColumnKind::kBinary; }));
}

std::optional<int> MilpProblem::find_column(std::string_view name) const {
  auto it = column_index_.find(std::string(name));
  if (it == column_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> MilpProblem::find_row(std::string_view name) const {
  auto it = row_index_.find(std::string(name));
  if (it == row_index_.end()) return std::nullopt;
  return it->second;
}

double MilpProblem::objective_value(std::span<const double> x) const {
  double total = 0.0;
  for (std::size_t j = 0; j < columns_.size(); ++j) total += columns_[j].objective * x[j];
  return total;
}

double MilpProblem::row_activity(int row, std::span<const double> x) const {
  double total = 0.0;
  for (const Term& t : rows_[static_cast<std::size_t>(row)].terms) {
    total += t.coefficient * x[static_cast<std::size_t>(t.column)];
  }
  return total;
}

double MilpProblem::max_violation(std::span<const double> x, int* worst_row) const {
  double worst = 0.0;
  int where = -1;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const double v = std::max(columns_[j].lower - x[j], x[j] - columns_[j].upper);
    if (v > worst) {
      worst = v;
      where = -1;
    }
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const double a = row_activity(static_cast<int>(i), x);
    double v = 0.0;
    switch (rows_[i].sense) {
      case RowSense::kLessEqual: v = a - rows_[i].rhs; break;
      case RowSense::kGreaterEqual: v = rows_[i].rhs - a; break;
      case RowSense::kEqual: v = std::abs(a - rows_[i].rhs); break;
    }
    if (v > worst) {
      worst = v;
      where = static_cast<int>(i);
    }
  }
  if (worst_row != nullptr) *worst_row = where;
  return worst;
}

std::string_view status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kInfeasible: return "Infeasible";
    case SolveStatus::kUnbounded: return "Unbounded";
    case SolveStatus::kGapLimit: return "GapLimit";
    case SolveStatus::kIterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

}  // namespace flexplan
