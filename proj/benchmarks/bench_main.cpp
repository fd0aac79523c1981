#include <manifold_descent/bench.hpp>
#include <manifold_descent/integrate.hpp>

#include <benchmark/benchmark.h>

using namespace manifold_descent;

namespace {

Objective make_objective(Eigen::Index n) {
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = 1.0 + 3.0 * static_cast<double>(i) / static_cast<double>(n);
  return Objective::spd_quadratic(d.asDiagonal());
}

void BM_Rhs(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Objective obj = make_objective(n);
  const PhaseState s{Vector::Ones(n), Vector::Zero(n)};
  const auto m = MethodSpec::proposed(1.0, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(rhs(m, obj, s));
}
BENCHMARK(BM_Rhs)->Arg(1)->Arg(16)->Arg(128);

void BM_Rk4Step(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Objective obj = make_objective(n);
  PhaseState s{Vector::Ones(n), Vector::Zero(n)};
  const auto m = MethodSpec::proposed(1.0, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(s = step(Scheme::Rk4, m, obj, s, 1e-3));
}
BENCHMARK(BM_Rk4Step)->Arg(1)->Arg(16)->Arg(128);

void BM_Simulate(benchmark::State& state) {
  const Objective obj = Objective::unit_quadratic(1);
  IntegratorConfig cfg;
  const PhaseState x0{Vector::Ones(1), Vector()};
  for (auto _ : state) benchmark::DoNotOptimize(simulate(MethodSpec::proposed(1.0, 0.9), obj, x0, cfg));
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

void BM_MatrixExponential(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix M = system_matrix(MethodSpec::proposed(1.0, 0.9), make_objective(n)) * 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(matrix_exponential(M));
}
BENCHMARK(BM_MatrixExponential)->Arg(1)->Arg(8)->Arg(32);

void BM_Sweep(benchmark::State& state) {
  SweepSpec spec;
  spec.alphas = {1, 10};
  spec.betas = {0.3, 0.6, 0.9};
  spec.methods = {MethodSpec::pni(1, 1), MethodSpec::proposed(1, 1)};
  spec.seeds = {0};
  spec.integrator.h = 1e-2;
  spec.x0 = {Vector::Ones(1), Vector()};
  const Objective obj = Objective::unit_quadratic(1);
  for (auto _ : state) benchmark::DoNotOptimize(sweep(spec, obj));
}
BENCHMARK(BM_Sweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
