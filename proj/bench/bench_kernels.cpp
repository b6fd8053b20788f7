// Serial reference against OpenMP kernels, and the scenario-parallel
// evaluation loop at one and several threads.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <numeric>
#include <random>
#include <vector>

#include "flexplan/config.hpp"
#include "flexplan/optimizer.hpp"
#include "flexplan/tableau_kernels.hpp"

using namespace flexplan;

namespace {

struct Tableau {
  std::vector<double> data;
  std::vector<std::uint32_t> support;
  std::size_t rows, cols;
};

Tableau make_tableau(std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(rows * 131 + cols);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tableau t{std::vector<double>(rows * cols), {}, rows, cols};
  for (double& v : t.data) v = u(rng);
  t.support.resize(cols);
  std::iota(t.support.begin(), t.support.end(), 0u);
  return t;
}

template <bool Parallel>
void BM_Pivot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Tableau t = make_tableau(n, 2 * n);
  std::size_t r = 0;
  for (auto _ : state) {
    // Rotate the pivot so values stay bounded.
    const std::size_t row = r++ % n;
    t.data[row * t.cols + row] = 1.5;
    if constexpr (Parallel) {
      kernels::pivot_parallel(t.data, t.cols, row, row, t.support);
    } else {
      kernels::pivot_serial(t.data, t.cols, row, row, t.support);
    }
    benchmark::DoNotOptimize(t.data.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(t.data.size()));
}

template <bool Parallel>
void BM_WeightedRowSum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tableau t = make_tableau(n, 2 * n);
  std::vector<double> w(n, 0.5), out(t.cols);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::weighted_row_sum_parallel(t.data, t.cols, w, out);
    } else {
      kernels::weighted_row_sum_serial(t.data, t.cols, w, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(t.data.size()));
}

// Whole relaxation of the station campaign through either kernel set.
void BM_StationRelaxation(benchmark::State& state) {
  const Campaign c = make_campaign(load_config(FLEXPLAN_DATA_DIR "/station_resupply.json"));
  const ScenarioSet op = operating_scenarios(c, 8, 1);
  const AssembledProblem a = assemble(100.0, c, op);
  SolverOptions o;
  o.kernel = state.range(0) ? KernelMode::kParallel : KernelMode::kSerial;
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp(a.problem, o).objective);
}

// Rule evaluation: one logistics LP per scenario, scenarios in parallel.
void BM_Evaluate(benchmark::State& state) {
  const Campaign c = make_campaign(load_config(FLEXPLAN_DATA_DIR "/fig1_toy.json"));
  const ScenarioSet eval = evaluation_scenarios(c, 64, 2);
  const DecisionRuleSet rules{"station", {0, 1, 2}, {{0.0}, {40.0}, {60.0}}};
  OptimizeOptions o;
  o.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_rules({rules}, eval, c, o).expected_J);
}

}  // namespace

BENCHMARK(BM_Pivot<false>)->Name("pivot/serial")->Arg(128)->Arg(512)->Arg(1024);
BENCHMARK(BM_Pivot<true>)->Name("pivot/parallel")->Arg(128)->Arg(512)->Arg(1024);
BENCHMARK(BM_WeightedRowSum<false>)->Name("row_sum/serial")->Arg(512)->Arg(1024);
BENCHMARK(BM_WeightedRowSum<true>)->Name("row_sum/parallel")->Arg(512)->Arg(1024);
BENCHMARK(BM_StationRelaxation)->Name("station_relaxation")->ArgName("parallel")->Arg(0)->Arg(1)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Evaluate)->Name("evaluate_64")->ArgName("threads")->Arg(1)->Arg(omp_get_max_threads())
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
