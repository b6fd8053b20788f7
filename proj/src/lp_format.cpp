#include "flexplan/lp_format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "flexplan/errors.hpp"

namespace flexplan {
namespace {

constexpr std::size_t kWrapColumn = 200;

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Appends " + c name" style terms, wrapping long lines with a leading space.
class LineWriter {
 public:
  explicit LineWriter(std::string& out) : out_(out) {}

  void start(const std::string& text) {
    out_ += text;
    width_ = text.size();
  }
  void piece(const std::string& text) {
    if (width_ + text.size() > kWrapColumn) {
      out_ += '\n';
      width_ = 0;
    }
    out_ += text;
    width_ += text.size();
  }
  void end() {
    out_ += '\n';
    width_ = 0;
  }

 private:
  std::string& out_;
  std::size_t width_ = 0;
};

void write_term(LineWriter& w, double coefficient, const std::string& name, bool first) {
  std::string text;
  if (coefficient < 0.0) {
    text = " - " + format_number(-coefficient);
  } else {
    text = first ? " " + format_number(coefficient) : " + " + format_number(coefficient);
  }
  w.piece(text + " " + name);
}

std::vector<std::string> sanitized_names(const MilpProblem& problem, bool columns) {
  std::vector<std::string> names;
  std::unordered_map<std::string, std::string> seen;
  const std::size_t count = columns ? problem.num_columns() : problem.num_rows();
  names.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string& raw = columns ? problem.column(static_cast<int>(i)).name
                                     : problem.row(static_cast<int>(i)).name;
    std::string s = sanitize_lp_name(raw);
    auto [it, inserted] = seen.emplace(s, raw);
    if (!inserted) {
      throw Error(ErrorKind::kNameCollision,
                  "'" + raw + "' and '" + it->second + "' both sanitize to '" + s + "'");
    }
    names.push_back(std::move(s));
  }
  return names;
}

bool parse_double(std::string_view token, double& out) {
  if (token == "inf" || token == "+inf" || token == "infinity" || token == "+infinity") {
    out = kInfinity;
    return true;
  }
  if (token == "-inf" || token == "-infinity") {
    out = -kInfinity;
    return true;
  }
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string lower_case(std::string_view s) {
  std::string r(s);
  for (char& c : r) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return r;
}

[[noreturn]] void parse_fail(int line, const std::string& message) {
  throw Error(ErrorKind::kParseError, "line " + std::to_string(line) + ": " + message);
}

struct Token {
  std::string text;
  int line;
};

// Linear expression "[+|-] [coef] name ..." starting at tokens[pos].
std::vector<std::pair<double, std::string>> read_terms(const std::vector<Token>& tokens,
                                                       std::size_t& pos,
                                                       const std::unordered_set<std::string>& stops) {
  std::vector<std::pair<double, std::string>> terms;
  double sign = 1.0;
  double coef = 1.0;
  bool have_coef = false;
  while (pos < tokens.size() && stops.count(tokens[pos].text) == 0) {
    const Token& t = tokens[pos];
    if (t.text == "+") {
      sign = 1.0;
    } else if (t.text == "-") {
      sign = -1.0;
    } else {
      double v;
      if (parse_double(t.text, v)) {
        if (have_coef) parse_fail(t.line, "two numbers in a row");
        coef = v;
        have_coef = true;
      } else {
        terms.emplace_back(sign * coef, t.text);
        sign = 1.0;
        coef = 1.0;
        have_coef = false;
      }
    }
    ++pos;
  }
  if (have_coef) parse_fail(tokens[pos - 1].line, "dangling coefficient");
  return terms;
}

}  // namespace

std::string sanitize_lp_name(std::string_view name) {
  std::string s;
  s.reserve(name.size() + 1);
  for (char c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    s += ok ? c : '_';
  }
  if (s.empty()) return "_";
  const bool numeric_start = std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '.';
  const bool exponent_like = (s[0] == 'e' || s[0] == 'E') && s.size() > 1 &&
                             std::isdigit(static_cast<unsigned char>(s[1]));
  if (numeric_start || exponent_like) s.insert(s.begin(), '_');
  return s;
}

std::string export_lp(const MilpProblem& problem) {
  const std::vector<std::string> cols = sanitized_names(problem, true);
  const std::vector<std::string> rows = sanitized_names(problem, false);

  std::string out = "\\ flexplan LP export\n";
  out += "Minimize\n";
  LineWriter w(out);
  w.start(" obj:");
  // Every column appears in the objective so the reader recovers column order.
  for (std::size_t j = 0; j < cols.size(); ++j) {
    write_term(w, problem.column(static_cast<int>(j)).objective, cols[j], j == 0);
  }
  w.end();
  if (problem.num_columns() == 0) return out + "End\n";

  out += "Subject To\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& row = problem.row(static_cast<int>(i));
    w.start(" " + rows[i] + ":");
    if (row.terms.empty()) {
      write_term(w, 0.0, cols[0], true);
    } else {
      for (std::size_t k = 0; k < row.terms.size(); ++k) {
        write_term(w, row.terms[k].coefficient,
                   cols[static_cast<std::size_t>(row.terms[k].column)], k == 0);
      }
    }
    const char* sense = row.sense == RowSense::kLessEqual ? " <= "
                        : row.sense == RowSense::kGreaterEqual ? " >= " : " = ";
    w.piece(sense + format_number(row.rhs));
    w.end();
  }

  out += "Bounds\n";
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const Column& c = problem.column(static_cast<int>(j));
    if (std::isinf(c.lower) && c.lower < 0 && std::isinf(c.upper) && c.upper > 0) {
      out += " " + cols[j] + " free\n";
    } else {
      out += " " + format_number(c.lower) + " <= " + cols[j] + " <= " + format_number(c.upper) + "\n";
    }
  }

  if (problem.num_binaries() > 0) {
    out += "Binary\n";
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (problem.column(static_cast<int>(j)).kind == ColumnKind::kBinary) out += " " + cols[j] + "\n";
    }
  }
  out += "End\n";
  return out;
}

MilpProblem parse_lp(std::string_view text) {
  enum class Section { kNone, kObjective, kConstraints, kBounds, kBinary, kEnd };

  // Split into section-tagged token streams; bounds stay line oriented.
  std::vector<Token> objective, constraints, binaries;
  std::vector<std::vector<Token>> bound_lines;
  Section section = Section::kNone;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto c = line.find('\\'); c != std::string::npos) line.erase(c);
    std::istringstream ls(line);
    std::vector<Token> toks;
    for (std::string t; ls >> t;) toks.push_back({t, line_no});
    if (toks.empty()) continue;

    const std::string head = lower_case(toks[0].text);
    if (toks.size() == 1 && (head == "minimize" || head == "minimise" || head == "min")) {
      section = Section::kObjective;
      continue;
    }
    if (toks.size() == 2 && head == "subject" && lower_case(toks[1].text) == "to") {
      section = Section::kConstraints;
      continue;
    }
    if (toks.size() == 1 && (head == "st" || head == "s.t.")) {
      section = Section::kConstraints;
      continue;
    }
    if (toks.size() == 1 && head == "bounds") {
      section = Section::kBounds;
      continue;
    }
    if (toks.size() == 1 && (head == "binary" || head == "binaries" || head == "bin")) {
      section = Section::kBinary;
      continue;
    }
    if (toks.size() == 1 && head == "end") {
      section = Section::kEnd;
      continue;
    }
    switch (section) {
      case Section::kObjective: objective.insert(objective.end(), toks.begin(), toks.end()); break;
      case Section::kConstraints: constraints.insert(constraints.end(), toks.begin(), toks.end()); break;
      case Section::kBounds: bound_lines.push_back(std::move(toks)); break;
      case Section::kBinary: binaries.insert(binaries.end(), toks.begin(), toks.end()); break;
      case Section::kNone: parse_fail(line_no, "content before Minimize");
      case Section::kEnd: parse_fail(line_no, "content after End");
    }
  }
  if (section != Section::kEnd) parse_fail(line_no, "missing End");

  MilpProblem problem;
  auto column_of = [&](const std::string& name) {
    if (auto j = problem.find_column(name)) return *j;
    return problem.add_continuous(name, 0.0, kInfinity, 0.0);
  };

  std::size_t pos = 0;
  if (!objective.empty() && objective[0].text.back() == ':') ++pos;
  for (const auto& [coef, name] : read_terms(objective, pos, {})) {
    problem.add_objective(column_of(name), coef);
  }

  static const std::unordered_set<std::string> senses = {"<=", "=<", "<", ">=", "=>", ">", "="};
  pos = 0;
  int unnamed = 0;
  while (pos < constraints.size()) {
    std::string name;
    if (constraints[pos].text.back() == ':') {
      name = constraints[pos].text.substr(0, constraints[pos].text.size() - 1);
      ++pos;
    } else {
      name = "R" + std::to_string(++unnamed);
    }
    const auto terms = read_terms(constraints, pos, senses);
    if (pos + 1 >= constraints.size()) parse_fail(constraints.back().line, "row '" + name + "' is incomplete");
    const std::string& s = constraints[pos].text;
    const RowSense sense = (s[0] == '<' || s == "=<") ? RowSense::kLessEqual
                           : (s[0] == '>' || s == "=>") ? RowSense::kGreaterEqual
                                                        : RowSense::kEqual;
    double rhs;
    if (!parse_double(constraints[pos + 1].text, rhs)) {
      parse_fail(constraints[pos + 1].line, "bad right-hand side '" + constraints[pos + 1].text + "'");
    }
    pos += 2;
    std::vector<Term> row_terms;
    for (const auto& [coef, col] : terms) row_terms.push_back({column_of(col), coef});
    problem.add_row(name, std::move(row_terms), sense, rhs);
  }

  for (const auto& toks : bound_lines) {
    const int ln = toks[0].line;
    double a, b;
    if (toks.size() == 2 && lower_case(toks[1].text) == "free") {
      const int j = column_of(toks[0].text);
      problem.set_bounds(j, -kInfinity, kInfinity);
    } else if (toks.size() == 5 && parse_double(toks[0].text, a) && parse_double(toks[4].text, b)) {
      const int j = column_of(toks[2].text);
      problem.set_bounds(j, a, b);
    } else if (toks.size() == 3 && parse_double(toks[2].text, a)) {
      const int j = column_of(toks[0].text);
      const Column& c = problem.column(j);
      if (toks[1].text == "<=") problem.set_bounds(j, c.lower, a);
      else if (toks[1].text == ">=") problem.set_bounds(j, a, c.upper);
      else if (toks[1].text == "=") problem.set_bounds(j, a, a);
      else parse_fail(ln, "bad bound operator");
    } else {
      parse_fail(ln, "unrecognized bound line");
    }
  }

  if (!binaries.empty()) {
    // Column kinds are fixed at creation, so rebuild with binaries marked.
    std::unordered_set<std::string> bin;
    for (const Token& t : binaries) bin.insert(t.text);
    MilpProblem typed;
    for (const Column& c : problem.columns()) {
      const bool is_bin = bin.erase(c.name) > 0;
      typed.add_column(c.name, is_bin ? ColumnKind::kBinary : ColumnKind::kContinuous,
                       c.lower, c.upper, c.objective);
    }
    if (!bin.empty()) parse_fail(binaries[0].line, "binary '" + *bin.begin() + "' is not a column");
    for (const Row& r : problem.rows()) typed.add_row(r.name, r.terms, r.sense, r.rhs);
    return typed;
  }
  return problem;
}

SolveResult import_solution(std::string_view text, const MilpProblem& problem) {
  const std::vector<std::string> cols = sanitized_names(problem, true);
  std::unordered_map<std::string, int> index;
  for (std::size_t j = 0; j < cols.size(); ++j) index.emplace(cols[j], static_cast<int>(j));

  SolveResult result;
  result.values.assign(problem.num_columns(), 0.0);
  std::vector<bool> seen(problem.num_columns(), false);
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string name, value;
    if (!(ls >> name) || name[0] == '#') continue;
    if (!(ls >> value)) parse_fail(line_no, "missing value for '" + name + "'");
    auto it = index.find(name);
    if (it == index.end()) {
      result.warnings.push_back("ignored unknown name '" + name + "' on line " + std::to_string(line_no));
      continue;
    }
    double v;
    if (!parse_double(value, v)) parse_fail(line_no, "bad value '" + value + "'");
    result.values[static_cast<std::size_t>(it->second)] = v;
    seen[static_cast<std::size_t>(it->second)] = true;
  }
  for (std::size_t j = 0; j < seen.size(); ++j) {
    if (!seen[j]) result.warnings.push_back("column '" + problem.column(static_cast<int>(j)).name + "' missing, taken as 0");
  }

  constexpr double kTol = 1e-6;
  for (std::size_t i = 0; i < problem.num_rows(); ++i) {
    const Row& row = problem.row(static_cast<int>(i));
    const double a = problem.row_activity(static_cast<int>(i), result.values);
    const double scale = std::max(1.0, std::abs(row.rhs));
    const bool bad = (row.sense != RowSense::kGreaterEqual && a > row.rhs + kTol * scale) ||
                     (row.sense != RowSense::kLessEqual && a < row.rhs - kTol * scale);
    if (bad) {
      throw Error(ErrorKind::kInfeasibleImport,
                  "row '" + row.name + "' violated: activity " + format_number(a) + " vs rhs " +
                      format_number(row.rhs));
    }
  }
  for (std::size_t j = 0; j < problem.num_columns(); ++j) {
    const Column& c = problem.column(static_cast<int>(j));
    const double v = result.values[j];
    const bool integral = c.kind != ColumnKind::kBinary || std::abs(v - std::round(v)) <= kTol;
    if (v < c.lower - kTol || v > c.upper + kTol || !integral) {
      throw Error(ErrorKind::kInfeasibleImport,
                  "column '" + c.name + "' value " + format_number(v) + " outside its domain");
    }
  }
  result.status = SolveStatus::kOptimal;
  result.objective = problem.objective_value(result.values);
  result.bound = result.objective;
  result.gap = 0.0;
  result.warnings.push_back("optimality reported by the external solver, not certified here");
  return result;
}

std::string export_solution(const MilpProblem& problem, const std::vector<double>& values) {
  const std::vector<std::string> cols = sanitized_names(problem, true);
  std::string out;
  for (std::size_t j = 0; j < cols.size(); ++j) out += cols[j] + " " + format_number(values[j]) + "\n";
  return out;
}

}  // namespace flexplan
