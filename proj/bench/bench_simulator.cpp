#include "taskspace/simulator.hpp"
#include "taskspace/task_system.hpp"

#include <benchmark/benchmark.h>

using namespace taskspace;

namespace {

TaskSystem one_type(double p) { return TaskSystem({"X"}, {{0, {0, 0}, p}, {0, {}, 1.0 - p}}, 0); }

SimulationOptions options(std::size_t samples, int threads) {
  SimulationOptions opt;
  opt.samples = samples;
  opt.kmax = 8;
  opt.seed = 7;
  opt.threads = threads;
  return opt;
}

void BM_TailSerial(benchmark::State& state) {
  const auto ts = one_type(0.4);
  const auto opt = options(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_tail_serial(ts, Policy::fifo(), opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TailOpenMP(benchmark::State& state) {
  const auto ts = one_type(0.4);
  const auto opt = options(static_cast<std::size_t>(state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_tail(ts, Policy::fifo(), opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_OptimalSerial(benchmark::State& state) {
  const auto ts = one_type(0.4);
  const auto opt = options(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_tail_serial(ts, OptimalScheduler{}, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_OptimalOpenMP(benchmark::State& state) {
  const auto ts = one_type(0.4);
  const auto opt = options(static_cast<std::size_t>(state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_tail(ts, OptimalScheduler{}, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_TailSerial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TailOpenMP)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OptimalSerial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OptimalOpenMP)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
