#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "flexplan/config.hpp"
#include "flexplan/errors.hpp"
#include "flexplan/network.hpp"
#include "flexplan/scenario.hpp"

using namespace flexplan;

namespace {

double closed_form_F(double lambda, double T, double d) {
  return (1.0 - std::exp(-lambda * d)) / (1.0 - std::exp(-lambda * T));
}

// Truncated mean by numerical integration of d f(d), for an oracle that
// shares no code with the library's closed form.
double integrated_mean(double lambda, double T) {
  const int n = 20000;
  const double h = T / n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double d = i * h;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    const double f = std::exp(-lambda * d);
    num += w * d * f;
    den += w * f;
  }
  return num / den;
}

double bisect_lambda_for_mean(double target, double T) {
  double lo = 1e-8, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (integrated_mean(mid, T) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("cdf endpoints and monotonicity") {
  const TruncExpCdf c{0.05, 90.0};
  CHECK(c.cdf(0.0) == 0.0);
  CHECK(c.cdf(90.0) == doctest::Approx(1.0).epsilon(1e-15));
  double prev = -1.0;
  for (double d = 0.0; d <= 90.0; d += 0.5) {
    CHECK(c.cdf(d) > prev);
    prev = c.cdf(d);
  }
  CHECK(c.cdf(30.0) == doctest::Approx(closed_form_F(0.05, 90.0, 30.0)).epsilon(1e-14));
}

TEST_CASE("inverse transform values") {
  const TruncExpCdf c{0.05, 90.0};
  CHECK(c.inverse(0.0) == 0.0);
  CHECK(c.inverse(std::nextafter(1.0, 0.0)) == doctest::Approx(90.0).epsilon(1e-9));
  // F(d) = 0.5 solved by bisection on the closed form.
  double lo = 0.0, hi = 90.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (closed_form_F(0.05, 90.0, mid) < 0.5 ? lo : hi) = mid;
  }
  CHECK(c.inverse(0.5) == doctest::Approx(lo).epsilon(1e-12));
  CHECK(c.inverse(0.5) == doctest::Approx(13.642).epsilon(1e-4));
}

TEST_CASE("round trip F(inverse(u)) = u") {
  const TruncExpCdf c{0.05, 90.0};
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform_draw(99, static_cast<std::uint64_t>(i));
    CHECK(std::abs(c.cdf(c.inverse(u)) - u) <= 1e-12);
  }
}

TEST_CASE("fit: two samples give the matching truncated mean") {
  const DelayFit f = fit_delay_cdf({10.0, 20.0}, 90.0);
  CHECK(f.cdf.mean() == doctest::Approx(15.0).epsilon(1e-9));
  CHECK(f.cdf.lambda == doctest::Approx(bisect_lambda_for_mean(15.0, 90.0)).epsilon(1e-5));
}

TEST_CASE("fit: boundary and error cases") {
  const DelayFit f = fit_delay_cdf(std::vector<double>(5, 90.0), 90.0);
  CHECK(f.cdf.lambda == 1e-6);
  CHECK_FALSE(f.warnings.empty());

  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kIoError;
  };
  CHECK(kind_of([] { fit_delay_cdf({0.0, 0.0, 0.0}); }) == ErrorKind::kDegenerateSamples);
  CHECK(kind_of([] { fit_delay_cdf({3.0}); }) == ErrorKind::kDegenerateSamples);
  CHECK(kind_of([] { fit_delay_cdf({3.0, 91.0}); }) == ErrorKind::kOutOfRange);
}

TEST_CASE("fit recovers lambda from 1e5 draws") {
  const TruncExpCdf c{0.05, 90.0};
  std::vector<double> d;
  for (int i = 0; i < 100000; ++i) d.push_back(c.inverse(uniform_draw(7, static_cast<std::uint64_t>(i))));
  const DelayFit f = fit_delay_cdf(d, 90.0);
  CHECK(f.cdf.lambda >= 0.048);
  CHECK(f.cdf.lambda <= 0.052);
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= static_cast<double>(d.size());
  CHECK(f.cdf.mean() == doctest::Approx(mean).epsilon(1e-9));
}

TEST_CASE("sampling: determinism, equiprobability, rounding") {
  const TruncExpCdf c{0.05, 90.0};
  const ScenarioSet a = sample_scenario_set(c, 4, 64, 123, ScenarioRole::kOperating);
  const ScenarioSet b = sample_scenario_set(c, 4, 64, 123, ScenarioRole::kOperating);
  CHECK(a == b);
  const ScenarioSet other = sample_scenario_set(c, 4, 64, 124, ScenarioRole::kOperating);
  CHECK_FALSE(a == other);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Scenario& s = a.scenarios[k];
    CHECK(s.p == 1.0 / 64.0);
    for (std::size_t l = 0; l < 4; ++l) {
      // Round half up of the continuous draw with index k * L + l.
      const double d = c.inverse(uniform_draw(123, k * 4 + l));
      CHECK(s.delays[l] == static_cast<int>(std::floor(d + 0.5)));
      CHECK(s.delays[l] >= 0);
      CHECK(s.delays[l] <= 90);
    }
  }
}

TEST_CASE("sampling: point mass gives the no-delay scenario") {
  TruncExpCdf c;
  c.point_mass_at_zero = true;
  const ScenarioSet s = sample_scenario_set(c, 3, 1, 5, ScenarioRole::kOperating);
  REQUIRE(s.size() == 1);
  CHECK(s.scenarios[0].delays == std::vector<int>{0, 0, 0});
  CHECK(s.scenarios[0].p == 1.0);
}

TEST_CASE("sampling: KS distance, lambda recovery and independence") {
  const TruncExpCdf c{0.05, 90.0};
  const int n = 100000;
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = c.inverse(uniform_draw(2024, static_cast<std::uint64_t>(i)));
  std::sort(d.begin(), d.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double F = closed_form_F(0.05, 90.0, d[static_cast<std::size_t>(i)]);
    ks = std::max({ks, std::abs(F - static_cast<double>(i) / n), std::abs(F - static_cast<double>(i + 1) / n)});
  }
  CHECK(ks < 0.01);

  const ScenarioSet set = sample_scenario_set(c, 2, n, 2024, ScenarioRole::kEvaluation);
  std::vector<double> flat;
  double m1 = 0.0, m2 = 0.0;
  for (const Scenario& s : set.scenarios) {
    flat.push_back(s.delays[0]);
    flat.push_back(s.delays[1]);
    m1 += s.delays[0];
    m2 += s.delays[1];
  }
  const DelayFit f = fit_delay_cdf(flat, 90.0);
  CHECK(std::abs(f.cdf.lambda - 0.05) / 0.05 < 0.05);

  m1 /= n;
  m2 /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (const Scenario& s : set.scenarios) {
    const double x = s.delays[0] - m1, y = s.delays[1] - m2;
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 0.01);
}

TEST_CASE("delay csv keeps the planning window") {
  const auto path = std::filesystem::temp_directory_path() / "flexplan_delays_test.csv";
  {
    std::ofstream f(path);
    f << "days_to_planned_launch,delay_days\n30,4\n90,10\n91,50\n200,70\n";
  }
  const std::vector<double> d = read_delay_csv(path, 90.0);
  CHECK(d == std::vector<double>{4.0, 10.0});
  std::filesystem::remove(path);
}

TEST_CASE("time windows follow realized launches") {
  const CampaignConfig cfg = load_config(FLEXPLAN_DATA_DIR "/fig1_toy.json");
  const TimeExpandedNetwork net = build_network(cfg);
  LaunchTimeline tl;
  for (const auto& l : cfg.launches) tl.nominal.push_back(l.nominal_day);

  ScenarioSet set;
  set.scenarios = {{0, {0, 0, 0}, 0.5}, {1, {0, 50, 90}, 0.5}};
  const TimeWindows w = build_time_windows(tl, net, set);
  std::vector<int> zero, late;
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    if (net.arcs[a].kind != ArcKind::kLaunch) {
      CHECK(w.windows[0][a] == -1);
      continue;
    }
    zero.push_back(w.windows[0][a]);
    late.push_back(w.windows[1][a]);
  }
  CHECK(zero == std::vector<int>{0, 100, 200});
  CHECK(late == std::vector<int>{0, 150, 290});

  // A final launch late by the maximum delay still fits the horizon.
  LaunchTimeline edge{{0, 100, cfg.mission_end_day}};
  ScenarioSet worst;
  worst.scenarios = {{0, {0, 0, 90}, 1.0}};
  CHECK_NOTHROW(build_time_windows(edge, net, worst));
  LaunchTimeline past{{0, 100, cfg.mission_end_day + 1}};
  try {
    build_time_windows(past, net, worst);
    FAIL("expected HorizonExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kHorizonExceeded);
  }
}
