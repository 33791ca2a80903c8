#include <benchmark/benchmark.h>

#include "dcshift/batch.hpp"
#include "dcshift/synthetic.hpp"

using namespace dcshift;

namespace {

const SyntheticCase& fixture() {
  static const SyntheticCase sc = gen_synthetic_case(12, 3, 42, 48);
  return sc;
}

BatchConfig config(int threads) {
  BatchConfig c;
  c.strategies = {Strategy::none, Strategy::flex, Strategy::lmp, Strategy::co2_marginal,
                  Strategy::average, Strategy::excess};
  c.flexibility = uniform_flexibility(fixture().network, 0.2);
  c.threads = threads;
  return c;
}

void BM_BatchSerial(benchmark::State& state) {
  const auto& sc = fixture();
  const BatchConfig c = config(1);
  for (auto _ : state) benchmark::DoNotOptimize(run_batch_serial(sc.network, sc.hours, c));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(sc.hours.size()));
}

void BM_BatchParallel(benchmark::State& state) {
  const auto& sc = fixture();
  const BatchConfig c = config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_batch_parallel(sc.network, sc.hours, c));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(sc.hours.size()));
}

void BM_SingleOpf(benchmark::State& state) {
  const auto& sc = fixture();
  const Network net = apply_scenario(sc.network, sc.hours[12]);
  for (auto _ : state) benchmark::DoNotOptimize(solve_dcopf(net, {}));
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SingleOpf)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
