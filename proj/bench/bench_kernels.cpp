// Serial reference kernels vs the OpenMP versions, and the two implicit solvers.
#include <benchmark/benchmark.h>

#include <random>

#include "lef/implicit_solver.hpp"
#include "lef/kernels.hpp"

using namespace lef;

namespace {

GridPtr bench_grid(int n) { return Grid::cartesian(DomainSpec::disk(1.0), n); }

std::vector<double> random_values(std::size_t n) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

void BM_StiffnessSerial(benchmark::State& state) {
  auto g = bench_grid(static_cast<int>(state.range(0)));
  auto u = random_values(g->size());
  std::vector<double> out(u.size());
  for (auto _ : state) {
    kernels::serial::stiffness_apply(*g, u, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_StiffnessOmp(benchmark::State& state) {
  auto g = bench_grid(static_cast<int>(state.range(0)));
  auto u = random_values(g->size());
  std::vector<double> out(u.size());
  for (auto _ : state) {
    kernels::stiffness_apply(*g, u, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_EnergySerial(benchmark::State& state) {
  auto g = bench_grid(static_cast<int>(state.range(0)));
  auto u = random_values(g->size());
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::serial::dirichlet_form(*g, u) +
                             kernels::serial::power_integral(*g, u, 9.0));
}

void BM_EnergyOmp(benchmark::State& state) {
  auto g = bench_grid(static_cast<int>(state.range(0)));
  auto u = random_values(g->size());
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::dirichlet_form(*g, u) + kernels::power_integral(*g, u, 9.0));
}

void BM_ImplicitFFT(benchmark::State& state) {
  auto g = Grid::polar(DomainSpec::disk(1.0), static_cast<int>(state.range(0)), 64);
  auto rhs = random_values(g->size());
  std::vector<double> x(rhs.size(), 0.0);
  PolarFFTSolver solver(g);
  for (auto _ : state) {
    solver.solve(1e-3, rhs, x);
    benchmark::DoNotOptimize(x.data());
  }
}

void BM_ImplicitCG(benchmark::State& state) {
  auto g = Grid::polar(DomainSpec::disk(1.0), static_cast<int>(state.range(0)), 64);
  auto rhs = random_values(g->size());
  std::vector<double> x(rhs.size(), 0.0);
  CGSolver solver(g);
  for (auto _ : state) {
    std::fill(x.begin(), x.end(), 0.0);
    solver.solve(1e-3, rhs, x);
    benchmark::DoNotOptimize(x.data());
  }
}

}  // namespace

BENCHMARK(BM_StiffnessSerial)->Arg(128)->Arg(512);
BENCHMARK(BM_StiffnessOmp)->Arg(128)->Arg(512);
BENCHMARK(BM_EnergySerial)->Arg(128)->Arg(512);
BENCHMARK(BM_EnergyOmp)->Arg(128)->Arg(512);
BENCHMARK(BM_ImplicitFFT)->Arg(64)->Arg(256);
BENCHMARK(BM_ImplicitCG)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
