// Serial reference against the OpenMP kernel for the Fisher functional, plus a small scan.
// Thread count follows OMP_NUM_THREADS.

#include "gridfisher/fisher.hpp"
#include "gridfisher/landscape.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <numbers>

using namespace gridfisher;

namespace {

ThetaParams params() {
  ThetaParams p;
  p.alpha = 10.0 / std::numbers::pi;
  return p;
}

Lattice lattice_for(int dim) { return named_lattice(dim == 2 ? NamedLattice::A2 : NamedLattice::D3); }

QuadratureRule rule_for(int dim) { return dim == 2 ? QuadratureRule{} : QuadratureRule{32, 64, 16, 32}; }

void BM_FisherReference(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const Lattice L = lattice_for(dim);
  const FiringField f = FiringField::uniform(dim, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(reference::fisher_functional(L, f, params(), rule_for(dim)));
}

void BM_FisherParallel(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const Lattice L = lattice_for(dim);
  const FiringField f = FiringField::uniform(dim, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(fisher_functional(L, f, params(), rule_for(dim)));
  state.counters["threads"] = omp_get_max_threads();
}

void BM_Scan2D(benchmark::State& state) {
  const FisherIntegrator integ(FiringField::uniform(2, 0.5), QuadratureRule{32, 64, 16, 32});
  ScanGrid2D grid;
  grid.nx = grid.ny = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scan_2d(integ, params(), grid).argmax);
  state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(BM_FisherReference)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FisherParallel)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Scan2D)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
