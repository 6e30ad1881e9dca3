// End-to-end estimation throughput: samples per second for each preset and
// metric, at a reduced sample count so a benchmark iteration stays short.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <map>
#include <string>

#include "specsim/metrics.hpp"
#include "specsim/presets.hpp"
#include "specsim/scenario.hpp"

using namespace specsim;

namespace {

const RunBundle& preset(const std::string& name) {
  static std::map<std::string, RunBundle> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, load_preset(name)).first;
  return it->second;
}

void run_samples(benchmark::State& state, const std::string& name,
                 MetricKind kind) {
  const RunBundle& b = preset(name);
  const std::int64_t n = state.range(0);
  ScenarioConfig config;
  config.kind = kind;
  config.eps = b.eps;
  config.beta = b.beta;
  config.feasibility_cap = b.feasibility_cap;
  config.sample_count = n;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    config.seed = seed++;
    const Estimate est = estimate(config, *b.space, *b.scheme, *b.system,
                                  *b.abstraction, b.norm_config);
    benchmark::DoNotOptimize(est.d_hat);
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_RunningExampleSpec(benchmark::State& state) {
  run_samples(state, "running-example", MetricKind::SPEC);
}
BENCHMARK(BM_RunningExampleSpec)->Arg(256);

void BM_RunningExampleRaw(benchmark::State& state) {
  run_samples(state, "running-example", MetricKind::SSM);
}
BENCHMARK(BM_RunningExampleRaw)->Arg(256);

void BM_QuadrotorFeasible(benchmark::State& state) {
  run_samples(state, "quadrotor-conservative", MetricKind::SSM_FEASIBLE);
}
BENCHMARK(BM_QuadrotorFeasible)->Arg(256);

void BM_QuadrotorSpec(benchmark::State& state) {
  run_samples(state, "quadrotor-optimistic", MetricKind::SPEC);
}
BENCHMARK(BM_QuadrotorSpec)->Arg(256);

void BM_SampleSize(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_size(0.01, 1e-6));
  }
}
BENCHMARK(BM_SampleSize);

}  // namespace

BENCHMARK_MAIN();
