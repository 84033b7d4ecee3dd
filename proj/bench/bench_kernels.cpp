// Serial reference vs OpenMP kernels on sparse PCA data.

#include <benchmark/benchmark.h>

#include <map>
#include <numeric>

#include "manismooth/kernels.hpp"
#include "manismooth/problem.hpp"
#include "manismooth/smoothing.hpp"

namespace ms = manismooth;

namespace {

const ms::StochasticProblem& problem(std::size_t N) {
  static std::map<std::size_t, ms::StochasticProblem> cache;
  auto it = cache.find(N);
  if (it == cache.end()) it = cache.emplace(N, ms::make_sparse_pca(100, 5, N, 0.1, 1)).first;
  return it->second;
}

ms::ManifoldPoint start(const ms::StochasticProblem& p) {
  ms::Rng rng = ms::named_stream(1, "init");
  return ms::random_point(p.manifold(), rng);
}

void BM_FiniteSum(benchmark::State& state, ms::Exec exec) {
  const auto& p = problem(static_cast<std::size_t>(state.range(0)));
  const ms::ManifoldPoint x = start(p);
  for (auto _ : state) benchmark::DoNotOptimize(ms::finite_sum(p.smooth(), x.data(), exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SampleDeviation(benchmark::State& state, ms::Exec exec) {
  const auto& p = problem(static_cast<std::size_t>(state.range(0)));
  const ms::ManifoldPoint x = start(p);
  const Eigen::MatrixXd g = ms::full_riemannian_grad(p, x).data();
  std::vector<std::size_t> idx(p.num_samples());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (auto _ : state) benchmark::DoNotOptimize(ms::max_sample_deviation(p, x, g, idx, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_FiniteSum, serial, ms::Exec::Serial)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK_CAPTURE(BM_FiniteSum, parallel, ms::Exec::Parallel)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK_CAPTURE(BM_SampleDeviation, serial, ms::Exec::Serial)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_SampleDeviation, parallel, ms::Exec::Parallel)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
