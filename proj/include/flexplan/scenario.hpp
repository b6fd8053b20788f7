#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace flexplan {

struct TimeExpandedNetwork;

// Exponential delay density truncated to [0, max_delay]:
//   F(d) = (1 - exp(-lambda d)) / (1 - exp(-lambda max_delay)).
struct TruncExpCdf {
  double lambda = 0.05;
  double max_delay = 90.0;
  // Degenerate limit lambda -> infinity: every delay is zero.
  bool point_mass_at_zero = false;

  double cdf(double d) const;
  double inverse(double u) const;
  double mean() const;
  double log_density(double d) const;
};

struct DelayFit {
  TruncExpCdf cdf;
  double log_likelihood = 0.0;
  double sample_mean = 0.0;
  std::size_t samples = 0;
  std::vector<std::string> warnings;
};

// Mean of the truncated exponential on [0, T] as a function of lambda.
double truncated_mean(double lambda, double max_delay);

// Maximum-likelihood lambda. Throws DegenerateSamples (all zero, or fewer
// than two samples) and OutOfRange (a sample outside [0, max_delay]).
DelayFit fit_delay_cdf(const std::vector<double>& samples, double max_delay = 90.0);

// Reads `days_to_planned_launch,delay_days` and keeps rows with
// days_to_planned_launch <= planning_window.
std::vector<double> read_delay_csv(const std::filesystem::path& path, double planning_window = 90.0);

// Counter-based uniform stream: SplitMix64 of (seed, index), top 53 bits
// scaled to [0, 1).
double uniform_draw(std::uint64_t seed, std::uint64_t index);

enum class ScenarioRole { kOperating, kEvaluation };

struct Scenario {
  int id = 0;
  std::vector<int> delays;  // whole days per launch
  double p = 1.0;
  bool operator==(const Scenario&) const = default;
};

struct ScenarioSet {
  std::vector<Scenario> scenarios;
  std::uint64_t seed = 0;
  ScenarioRole role = ScenarioRole::kOperating;

  std::size_t size() const { return scenarios.size(); }
  std::size_t launches() const { return scenarios.empty() ? 0 : scenarios.front().delays.size(); }
  bool operator==(const ScenarioSet&) const = default;
};

// Draw index k * n_launches + l feeds launch l of scenario k. When
// `per_launch` is non-empty it supplies launch-specific distributions.
ScenarioSet sample_scenario_set(const TruncExpCdf& cdf, int n_launches, int n_scenarios,
                                std::uint64_t seed, ScenarioRole role,
                                const std::vector<TruncExpCdf>& per_launch = {});

// Checks equiprobability and equal launch counts; throws ValidationError.
void validate_scenario_set(const ScenarioSet& set);

struct LaunchTimeline {
  std::vector<int> nominal;

  int realized(const Scenario& s, std::size_t launch) const {
    return nominal[launch] + s.delays[launch];
  }
};

// Open day of every launch arc in every scenario: windows[k][arc] is the
// departure day, or -1 for arcs that are not launch arcs (always open).
struct TimeWindows {
  std::vector<std::vector<int>> windows;
};

// Throws HorizonExceeded when a realized launch or its arrival falls past
// the network horizon.
TimeWindows build_time_windows(const LaunchTimeline& timeline, const TimeExpandedNetwork& network,
                               const ScenarioSet& set);

}  // namespace flexplan
