#include <benchmark/benchmark.h>

#include "perish/simulator.hpp"

using namespace perish;

namespace {

const Instance& bench_instance() {
  static const Instance inst = make_iid_instance(40, Geometric{8.0}, uniform_int_values(1, 100));
  return inst;
}

void BM_MonteCarloSerial(benchmark::State& state) {
  const Instance& inst = bench_instance();
  const PolicyFactory f = make_policy_factory(inst, "multiple_mhr");
  const auto trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_serial(inst, f, trials, 1).ratio);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MonteCarloParallel(benchmark::State& state) {
  const Instance& inst = bench_instance();
  const PolicyFactory f = make_policy_factory(inst, "multiple_mhr");
  const auto trials = static_cast<std::size_t>(state.range(0));
  const ExecOptions ex{ExecMode::Parallel, static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo(inst, f, trials, 1, true, ex).ratio);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_MonteCarloSerial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Args({2000, 1})->Args({2000, 2})->Args({2000, 4})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
