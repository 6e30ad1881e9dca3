// Viability-kernel construction cost as the grid refines, plus the two
// queries the least-restrictive controller makes on every step.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <memory>

#include "specsim/dynamics.hpp"
#include "specsim/geometry.hpp"
#include "specsim/reach.hpp"

using namespace specsim;

namespace {

SetExpr corridor_avoid() {
  return SetExpr::complement(SetExpr::box(Eigen::VectorXd::Constant(1, 0.5),
                                          Eigen::VectorXd::Constant(1, 2.5)))
      .onto({0});
}

void BM_KernelBackup(benchmark::State& state) {
  const int nodes = static_cast<int>(state.range(0));
  auto model = std::make_shared<QuadrotorVertical>(15.0);
  const auto controls = scalar_levels(0.0, 1.0, 11);
  KernelGridSpec spec;
  spec.n0 = nodes;
  spec.n1 = nodes;
  for (auto _ : state) {
    SafetyKernel k =
        compute_kernel(model, corridor_avoid(), 0.0, spec, controls, 100);
    benchmark::DoNotOptimize(k.grid().values(0, 0));
  }
  state.SetComplexityN(nodes);
}
BENCHMARK(BM_KernelBackup)->Arg(41)->Arg(81)->Arg(121)->Complexity();

const SafetyKernel& shared_kernel() {
  static SafetyKernel kernel = [] {
    auto model = std::make_shared<QuadrotorVertical>(15.0);
    KernelGridSpec spec;
    spec.n0 = 81;
    spec.n1 = 81;
    return compute_kernel(model, corridor_avoid(), 0.0, spec,
                          scalar_levels(0.0, 1.0, 11), 100);
  }();
  return kernel;
}

void BM_KernelValue(benchmark::State& state) {
  const SafetyKernel& k = shared_kernel();
  Eigen::VectorXd x(2);
  x << 1.37, -0.42;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k.value(x));
  }
}
BENCHMARK(BM_KernelValue);

void BM_KernelSafeAction(benchmark::State& state) {
  const SafetyKernel& k = shared_kernel();
  Eigen::VectorXd x(2);
  x << 0.61, -1.8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k.safe_action(x)(0));
  }
}
BENCHMARK(BM_KernelSafeAction);

}  // namespace

BENCHMARK_MAIN();
