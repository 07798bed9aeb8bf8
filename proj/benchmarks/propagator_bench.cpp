// Single-step cost of each propagator on a random symmetric coupling matrix.

#include <random>

#include <benchmark/benchmark.h>

#include "scmocc/bench.hpp"
#include "scmocc/propagators.hpp"

namespace {

using namespace scmocc;

RealMatrix random_symmetric(std::size_t n) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  RealMatrix v(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) v(i, j) = v(j, i) = u(rng);
  return v;
}

ComplexVector ground(std::size_t n) {
  ComplexVector a = ComplexVector::Zero(n);
  a[0] = 1.0;
  return a;
}

void BM_CrankNicolson(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RealMatrix v = random_symmetric(n);
  ComplexVector a = ground(n);
  for (auto _ : state) {
    a = step_crank_nicolson(v, a, 0.01);
    benchmark::DoNotOptimize(a.data());
  }
}

void BM_Chebyshev(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RealMatrix v = random_symmetric(n);
  const SpectralBounds bounds = gershgorin_bounds(v);
  ComplexVector a = ground(n);
  for (auto _ : state) {
    a = step_chebyshev(v, a, 0.05, bounds);
    benchmark::DoNotOptimize(a.data());
  }
}

void BM_RK4(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RealMatrix v0 = random_symmetric(n);
  const HamiltonianFn v = [&](double, RealMatrix& out) { out = v0; };
  ComplexVector a = ground(n);
  for (auto _ : state) {
    a = step_rk4(v, a, 0.0, 0.01);
    benchmark::DoNotOptimize(a.data());
  }
}

void BM_RKF45(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RealMatrix v0 = random_symmetric(n);
  const HamiltonianFn v = [&](double, RealMatrix& out) { out = v0; };
  ComplexVector a = ground(n);
  for (auto _ : state) {
    const AdaptiveStep s = step_rkf45(v, a, 0.0, 0.05, 1e-6);
    a = s.a;
    benchmark::DoNotOptimize(a.data());
  }
}

void BM_Diagonalization(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RealMatrix v = random_symmetric(n);
  ComplexVector a = ground(n);
  for (auto _ : state) {
    a = step_diagonalization(v, a, 0.2);
    benchmark::DoNotOptimize(a.data());
  }
}

void BM_Gershgorin(benchmark::State& state) {
  const RealMatrix v = random_symmetric(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gershgorin_bounds(v));
}

void BM_ExactBounds(benchmark::State& state) {
  const RealMatrix v = random_symmetric(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(exact_bounds(v));
}

void BM_SyntheticCollision(benchmark::State& state) {
  const DiabaticModel model = build_analytic(SyntheticSpec{});
  const BenchCase c = standard_case();
  const auto& cfg = c.configs.at(static_cast<std::size_t>(state.range(0)));
  state.SetLabel(cfg.label);
  CollisionOptions o;
  o.propagator = cfg.config;
  for (auto _ : state) benchmark::DoNotOptimize(run_collision(model, c.problem.geom, 0, o).final_probs);
}

}  // namespace

BENCHMARK(BM_CrankNicolson)->Arg(2)->Arg(5)->Arg(10);
BENCHMARK(BM_Chebyshev)->Arg(2)->Arg(5)->Arg(10);
BENCHMARK(BM_RK4)->Arg(2)->Arg(5)->Arg(10);
BENCHMARK(BM_RKF45)->Arg(2)->Arg(5)->Arg(10);
BENCHMARK(BM_Diagonalization)->Arg(2)->Arg(5)->Arg(10);
BENCHMARK(BM_Gershgorin)->Arg(5);
BENCHMARK(BM_ExactBounds)->Arg(5);
BENCHMARK(BM_SyntheticCollision)->DenseRange(0, 9)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
