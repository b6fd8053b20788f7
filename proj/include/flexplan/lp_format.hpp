#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flexplan/milp.hpp"

namespace flexplan {

// Maps a column or row name onto the LP-format character set: anything
// outside [A-Za-z0-9_.] becomes '_', and names that would read as numbers get
// a leading '_'.
std::string sanitize_lp_name(std::string_view name);

// Writes the problem in LP format. Output depends only on the problem, so
// identical problems give identical bytes. Throws NameCollision when two
// names sanitize to the same string.
std::string export_lp(const MilpProblem& problem);

// Reads the subset of LP format that export_lp writes (tokens separated by
// whitespace). Throws ParseError with a line number on malformed input.
MilpProblem parse_lp(std::string_view text);

// Reads "name value" lines. Columns absent from the text are taken as 0 and
// reported in warnings. Throws InfeasibleImport naming the first violated row
// when the values break any row or bound by more than 1e-6.
SolveResult import_solution(std::string_view text, const MilpProblem& problem);

std::string export_solution(const MilpProblem& problem, const std::vector<double>& values);

}  // namespace flexplan
