#include "entgap/kernels.hpp"
#include "entgap/markov.hpp"
#include "entgap/simulator.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>
#include <vector>

using namespace entgap;

namespace {

std::vector<double> random_weights(std::size_t dim) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(dim);
  for (double& x : v) x = u(rng);
  return v;
}

void BM_PairKernel(benchmark::State& state, Backend backend) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd block = build_two_site_model(GateKind::cnot()).matrix;
  const auto x = random_weights(std::size_t{1} << (2 * n));
  std::vector<double> y(x.size());
  const SitePair pair{n / 2 - 1, n / 2};
  for (auto _ : state) {
    std::fill(y.begin(), y.end(), 0.0);
    if (backend == Backend::Serial)
      kernels::two_site_accumulate_serial(4, n, pair, block, x, y);
    else
      kernels::two_site_accumulate_parallel(4, n, pair, block, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}

void BM_MarkovApply(benchmark::State& state, Backend backend) {
  const int n = static_cast<int>(state.range(0));
  const auto m = assemble(GateKind::xy(), Topology::periodic_chain(n));
  const auto x = random_weights(m.dim());
  std::vector<double> y(x.size());
  for (auto _ : state) {
    m.apply(x, y, backend);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}

void BM_Trajectories(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  const int saved = omp_get_max_threads();
  omp_set_num_threads(threads);
  const auto spec = ProtocolSpec::make(GateKind::cnot(), Topology::open_chain(10), {0, 1, 2, 3, 4}, 50, 64, 1);
  for (auto _ : state) benchmark::DoNotOptimize(ensemble_purity(spec, StateVector::all_zero(10)).mean.data());
  omp_set_num_threads(saved);
}

}  // namespace

BENCHMARK_CAPTURE(BM_PairKernel, serial, Backend::Serial)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_PairKernel, parallel, Backend::Parallel)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_MarkovApply, serial, Backend::Serial)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MarkovApply, parallel, Backend::Parallel)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Trajectories)->Arg(1)->Arg(omp_get_num_procs())->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
