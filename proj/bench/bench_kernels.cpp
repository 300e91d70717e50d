// Serial references against the OpenMP kernels: the sweep task loop and the
// oracle's assignment enumeration.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "secmec/harness.hpp"
#include "secmec/oracle.hpp"

using namespace secmec;

namespace {

SweepSpec small_sweep() {
  SweepSpec spec = load_sweep(SECMEC_CONFIG_DIR "/sweep_T.json");
  spec.values = {0.2, 0.6};
  spec.base.seeds = {0, 1, 2, 3};
  return spec;
}

void BM_sweep(benchmark::State& state) {
  const SweepSpec spec = small_sweep();
  RunOptions opts;
  opts.timing = false;
  opts.parallel = state.range(0) != 0;
  opts.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(spec, opts));
  state.SetItemsProcessed(state.iterations() * spec.values.size() * spec.base.seeds.size() *
                          spec.base.schemes.size());
}

struct OracleCase {
  SystemConfig system;
  ChannelState channels;
};

OracleCase oracle_case() {
  ScenarioConfig sc = load_config(SECMEC_CONFIG_DIR "/tiny.json");
  sc.system.K = 2;
  sc.system.N = 3;
  sc.system.tasks.resize(2, sc.system.tasks[0]);
  return {sc.system, generate(sc.channel, sc.system, 0)};
}

void BM_oracle_serial(benchmark::State& state) {
  const OracleCase c = oracle_case();
  const GridSpec grid{17, 21, 16};
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_serial(c.system, c.channels, grid));
}

void BM_oracle_parallel(benchmark::State& state) {
  const OracleCase c = oracle_case();
  const GridSpec grid{17, 21, 16};
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force(c.system, c.channels, grid));
}

}  // namespace

// Argument 0 runs the serial loop; n > 0 uses n OpenMP threads.
BENCHMARK(BM_sweep)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_oracle_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_oracle_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
