// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "bhcone/hamiltonian.hpp"
#include "bhcone/qmc.hpp"

using namespace bhcone;

namespace {

// ring of L sites with N = L bosons
const SparseOperator& ring_hamiltonian(int sites) {
  static std::map<int, SparseOperator> cache;
  auto it = cache.find(sites);
  if (it == cache.end())
    it = cache.emplace(sites, build_model1_hamiltonian(build_model_one(LatticeKind::ring, sites, 1.0, -1.0), sites))
             .first;
  return it->second;
}

Eigen::VectorXcd random_vector(std::ptrdiff_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v;
}

template <bool Parallel>
void BM_SparseApply(benchmark::State& state) {
  const auto& h = ring_hamiltonian(static_cast<int>(state.range(0)));
  const Eigen::VectorXcd x = random_vector(h.dimension());
  Eigen::VectorXcd y;
  for (auto _ : state) {
    if constexpr (Parallel)
      h.apply(x, y);
    else
      h.apply_serial(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["dim"] = static_cast<double>(h.dimension());
  state.counters["nnz"] = static_cast<double>(h.nonzeros());
}

template <bool Parallel>
void BM_AdvanceWalkers(benchmark::State& state) {
  const int walkers = static_cast<int>(state.range(0));
  const QmcModel model(build_model_two(LatticeKind::ring, 8, std::polar(1.0, 0.3), -1.0, 0.5), 8);
  ProjectionSchedule schedule;
  schedule.splitting = Splitting::symmetric;
  const auto props = make_step_propagators(model, schedule);
  RankOneState start = model.trial();
  start.psi.normalize();
  std::vector<Walker> population(walkers, Walker{start, 1.0});
  int step = 0;
  for (auto _ : state) {
    ++step;
    if constexpr (Parallel)
      advance_walkers(population, model, schedule, props, 7, step);
    else
      advance_walkers_serial(population, model, schedule, props, 7, step);
    benchmark::DoNotOptimize(population.data());
  }
  state.SetItemsProcessed(state.iterations() * walkers);
}

}  // namespace

BENCHMARK(BM_SparseApply<false>)->Name("SparseApply/serial")->Arg(8)->Arg(10)->Arg(11)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SparseApply<true>)->Name("SparseApply/openmp")->Arg(8)->Arg(10)->Arg(11)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdvanceWalkers<false>)->Name("AdvanceWalkers/serial")->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdvanceWalkers<true>)->Name("AdvanceWalkers/openmp")->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
