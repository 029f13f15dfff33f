#include <random>

#include <benchmark/benchmark.h>

#include "hessgeo/barrier.hpp"
#include "hessgeo/shapes.hpp"
#include "hessgeo/solver.hpp"
#include "hessgeo/surface.hpp"
#include "hessgeo/symcone.hpp"

using namespace hessgeo;

namespace {

SymMatrix random_matrix(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < a.size(); ++i) a(i) = g(rng);
  return SymMatrix::from_dense(0.5 * (a + a.transpose()));
}

void BM_PTrace(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SymMatrix s = random_matrix(n, 7);
  for (auto _ : state)
    for (int m = 1; m <= n; ++m) benchmark::DoNotOptimize(p_trace(s, m));
}
BENCHMARK(BM_PTrace)->DenseRange(2, 8, 2);

void BM_ConeMembership(benchmark::State& state) {
  const SymMatrix s = random_matrix(static_cast<int>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(cone_membership(s));
}
BENCHMARK(BM_ConeMembership)->DenseRange(2, 8, 2);

void BM_CurvatureMatrix(benchmark::State& state) {
  ShapeSpec spec;
  spec.kind = ShapeKind::kHyperboloid;
  spec.n = static_cast<int>(state.range(0));
  spec.radius = 1.0;
  const SurfacePatch patch = make_patch(spec, Chart::kGraph);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(spec.n, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(curvature_matrix(patch, x));
}
BENCHMARK(BM_CurvatureMatrix)->DenseRange(2, 5);

void BM_BuildKernel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const BoundaryChart chart = ball_chart(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(build_kernel(chart));
}
BENCHMARK(BM_BuildKernel)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

void BM_SolveDisk(benchmark::State& state) {
  GridProblem p;
  p.domain.kind = DomainKind::kBall;
  p.domain.n = 2;
  p.h = 1.0 / static_cast<double>(state.range(0));
  p.m = 2;
  p.f = ScalarField::from_expression("1", 2);
  p.phi = ScalarField::from_expression("0.5*(x1^2 + x2^2)", 2);
  for (auto _ : state) benchmark::DoNotOptimize(solve(p));
}
BENCHMARK(BM_SolveDisk)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
