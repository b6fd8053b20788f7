#include "flexplan/scenario.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "flexplan/errors.hpp"
#include "flexplan/network.hpp"

namespace flexplan {

double TruncExpCdf::cdf(double d) const {
  if (point_mass_at_zero) return d >= 0.0 ? 1.0 : 0.0;
  if (d <= 0.0) return 0.0;
  if (d >= max_delay) return 1.0;
  return std::expm1(-lambda * d) / std::expm1(-lambda * max_delay);
}

double TruncExpCdf::inverse(double u) const {
  if (point_mass_at_zero) return 0.0;
  // d = -ln(1 - u (1 - e^{-lambda T})) / lambda, written with log1p/expm1.
  const double d = -std::log1p(u * std::expm1(-lambda * max_delay)) / lambda;
  return std::clamp(d, 0.0, max_delay);
}

double truncated_mean(double lambda, double max_delay) {
  const double x = lambda * max_delay;
  if (x < 1e-4) {
    // Series of 1/lambda - T/expm1(lambda T) around 0.
    return max_delay / 2.0 - lambda * max_delay * max_delay / 12.0;
  }
  return 1.0 / lambda - max_delay / std::expm1(x);
}

double TruncExpCdf::mean() const {
  return point_mass_at_zero ? 0.0 : truncated_mean(lambda, max_delay);
}

double TruncExpCdf::log_density(double d) const {
  // f(d) = lambda e^{-lambda d} / (1 - e^{-lambda T})
  return std::log(lambda) - lambda * d - std::log(-std::expm1(-lambda * max_delay));
}

DelayFit fit_delay_cdf(const std::vector<double>& samples, double max_delay) {
  if (samples.size() < 2) {
    throw Error(ErrorKind::kDegenerateSamples, "need at least two delay samples");
  }
  for (double s : samples) {
    if (!(s >= 0.0 && s <= max_delay)) {
      throw Error(ErrorKind::kOutOfRange,
                  "delay sample " + std::to_string(s) + " outside [0, " + std::to_string(max_delay) + "]");
    }
  }
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  if (mean == 0.0) {
    throw Error(ErrorKind::kDegenerateSamples, "all delay samples are zero; rate is unbounded");
  }

  DelayFit fit;
  fit.samples = samples.size();
  fit.sample_mean = mean;
  fit.cdf.max_delay = max_delay;

  // The score equation is truncated_mean(lambda) = sample mean. The mean
  // decreases from T/2 (lambda -> 0) to 0, so a mean at or above T/2 has no
  // positive root.
  constexpr double kMinLambda = 1e-6;
  if (mean >= truncated_mean(kMinLambda, max_delay)) {
    fit.cdf.lambda = kMinLambda;
    fit.warnings.push_back("sample mean " + std::to_string(mean) +
                           " is at or above the uniform limit; returning minimal rate 1e-6");
  } else {
    auto f = [&](double log_lambda) { return truncated_mean(std::exp(log_lambda), max_delay) - mean; };
    double lo = std::log(kMinLambda);
    double hi = std::log(1.0 / mean) + 1.0;
    while (f(hi) > 0.0) hi += 1.0;
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, [](double x, double y) { return std::abs(x - y) <= 1e-10 * std::max(1.0, std::abs(y)); },
        iters);
    fit.cdf.lambda = std::exp(0.5 * (a + b));
  }
  double ll = 0.0;
  for (double s : samples) ll += fit.cdf.log_density(s);
  fit.log_likelihood = ll;
  return fit;
}

std::vector<double> read_delay_csv(const std::filesystem::path& path, double planning_window) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kParseError, "empty delay CSV '" + path.string() + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "days_to_planned_launch,delay_days") {
    throw Error(ErrorKind::kParseError, "expected header 'days_to_planned_launch,delay_days'", path.string());
  }
  std::vector<double> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("missing comma");
      std::size_t used = 0;
      const double window = std::stod(line.substr(0, comma), &used);
      const double delay = std::stod(line.substr(comma + 1));
      if (window <= planning_window) out.push_back(delay);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParseError, "bad row on line " + std::to_string(line_no), path.string());
    }
  }
  return out;
}

double uniform_draw(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

ScenarioSet sample_scenario_set(const TruncExpCdf& cdf, int n_launches, int n_scenarios,
                                std::uint64_t seed, ScenarioRole role,
                                const std::vector<TruncExpCdf>& per_launch) {
  if (n_scenarios < 1 || n_launches < 1) {
    throw Error(ErrorKind::kValidationError, "scenario and launch counts must be positive");
  }
  if (!per_launch.empty() && per_launch.size() != static_cast<std::size_t>(n_launches)) {
    throw Error(ErrorKind::kValidationError, "per-launch distributions must match the launch count");
  }
  ScenarioSet set;
  set.seed = seed;
  set.role = role;
  set.scenarios.resize(static_cast<std::size_t>(n_scenarios));
  const double p = 1.0 / n_scenarios;
  for (int k = 0; k < n_scenarios; ++k) {
    Scenario& s = set.scenarios[static_cast<std::size_t>(k)];
    s.id = k;
    s.p = p;
    s.delays.resize(static_cast<std::size_t>(n_launches));
    for (int l = 0; l < n_launches; ++l) {
      const TruncExpCdf& f = per_launch.empty() ? cdf : per_launch[static_cast<std::size_t>(l)];
      const std::uint64_t index = static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(n_launches) +
                                  static_cast<std::uint64_t>(l);
      const double d = f.inverse(uniform_draw(seed, index));
      s.delays[static_cast<std::size_t>(l)] = static_cast<int>(std::floor(d + 0.5));
    }
  }
  return set;
}

void validate_scenario_set(const ScenarioSet& set) {
  if (set.scenarios.empty()) throw Error(ErrorKind::kValidationError, "scenario set is empty");
  const std::size_t launches = set.launches();
  double total = 0.0;
  for (const Scenario& s : set.scenarios) {
    if (s.delays.size() != launches) {
      throw Error(ErrorKind::kValidationError, "scenario " + std::to_string(s.id) + " has a different launch count");
    }
    for (int d : s.delays) {
      if (d < 0) throw Error(ErrorKind::kValidationError, "negative delay in scenario " + std::to_string(s.id));
    }
    total += s.p;
  }
  if (std::abs(total - 1.0) > 1e-12 * static_cast<double>(set.size()) + 1e-12) {
    throw Error(ErrorKind::kValidationError, "scenario probabilities sum to " + std::to_string(total));
  }
}

TimeWindows build_time_windows(const LaunchTimeline& timeline, const TimeExpandedNetwork& network,
                               const ScenarioSet& set) {
  TimeWindows w;
  w.windows.resize(set.size());
  for (std::size_t k = 0; k < set.size(); ++k) {
    const Scenario& s = set.scenarios[k];
    if (s.delays.size() != timeline.nominal.size()) {
      throw Error(ErrorKind::kValidationError,
                  "scenario " + std::to_string(s.id) + " has " + std::to_string(s.delays.size()) +
                      " delays for " + std::to_string(timeline.nominal.size()) + " launches");
    }
    auto& row = w.windows[k];
    row.assign(network.arcs.size(), -1);
    for (std::size_t a = 0; a < network.arcs.size(); ++a) {
      const Arc& arc = network.arcs[a];
      if (arc.kind != ArcKind::kLaunch) continue;
      const int day = timeline.realized(s, static_cast<std::size_t>(arc.launch));
      if (day < 0 || day + arc.flight_time >= network.horizon_days) {
        throw Error(ErrorKind::kHorizonExceeded,
                    "launch " + std::to_string(arc.launch + 1) + " in scenario " + std::to_string(s.id) +
                        " arrives on day " + std::to_string(day + arc.flight_time) + ", past the horizon");
      }
      row[a] = day;
    }
  }
  return w;
}

}  // namespace flexplan
