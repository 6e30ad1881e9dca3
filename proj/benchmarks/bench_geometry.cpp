// Signed-distance hot paths: these run once per trajectory step per sample,
// so they dominate satisfaction checks at large sample counts.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "specsim/geometry.hpp"

using namespace specsim;

namespace {

Eigen::VectorXd point(double a, double b) {
  Eigen::VectorXd x(2);
  x << a, b;
  return x;
}

void BM_BallEuclidean(benchmark::State& state) {
  const SetExpr ball = SetExpr::ball(point(1.0, -0.5), 0.75);
  const Eigen::VectorXd x = point(2.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(signed_distance(x, ball, Norm::Euclidean));
  }
}
BENCHMARK(BM_BallEuclidean);

void BM_BallInfinityInside(benchmark::State& state) {
  // Interior queries under the max norm take the closed-form branch.
  const SetExpr ball = SetExpr::ball(point(0.0, 0.0), 2.0);
  const Eigen::VectorXd x = point(0.3, -0.4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(signed_distance(x, ball, Norm::Infinity));
  }
}
BENCHMARK(BM_BallInfinityInside);

void BM_BallInfinityOutside(benchmark::State& state) {
  // Exterior max-norm queries bisect along the ray to the boundary.
  const SetExpr ball = SetExpr::ball(point(0.0, 0.0), 1.0);
  const Eigen::VectorXd x = point(3.0, -2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(signed_distance(x, ball, Norm::Infinity));
  }
}
BENCHMARK(BM_BallInfinityOutside);

void BM_BoxInside(benchmark::State& state) {
  const SetExpr box = SetExpr::box(point(-1.0, -1.0), point(1.0, 1.0));
  const Eigen::VectorXd x = point(0.2, -0.7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(signed_distance(x, box, Norm::Euclidean));
  }
}
BENCHMARK(BM_BoxInside);

void BM_CorridorSlice(benchmark::State& state) {
  // The quadrotor avoid set: complement of an interval, sliced onto the
  // altitude coordinate of the 2-D state.
  const SetExpr avoid =
      SetExpr::complement(SetExpr::box(Eigen::VectorXd::Constant(1, 0.5),
                                       Eigen::VectorXd::Constant(1, 2.5)))
          .onto({0});
  const Eigen::VectorXd x = point(1.7, 3.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(signed_distance(x, avoid, Norm::Euclidean));
  }
}
BENCHMARK(BM_CorridorSlice);

void BM_UnionOfFour(benchmark::State& state) {
  std::vector<SetExpr> members;
  for (int i = 0; i < 4; ++i) {
    members.push_back(SetExpr::ball(point(i, -i), 0.5));
  }
  const SetExpr u = SetExpr::union_of(members);
  const Eigen::VectorXd x = point(1.5, 2.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(signed_distance(x, u, Norm::Euclidean));
  }
}
BENCHMARK(BM_UnionOfFour);

}  // namespace

BENCHMARK_MAIN();
