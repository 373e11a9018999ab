#include <benchmark/benchmark.h>

#include <cmath>

#include "nsmooth/bounds.hpp"
#include "nsmooth/ensemble.hpp"
#include "nsmooth/piecewise_affine.hpp"
#include "nsmooth/smoothing.hpp"

using namespace nsmooth;

namespace {

SmoothedPotential synthetic(std::size_t d) {
  const double beta = select_beta(BetaMode::W2StronglyConvex, 0.1, std::log(10.0), 2.0);
  return SmoothedPotential(PiecewiseAffinePotential::random_normalized(d, 5, 4.0, 0), beta);
}

template <SamplerKind Kind, Execution Exec>
void BM_EnsembleAdvance(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto chains = static_cast<std::size_t>(state.range(1));
  const SmoothedPotential s = synthetic(d);
  SamplerConfig cfg;
  Ensemble e(Kind, s, cfg, chains);
  for (auto _ : state) {
    e.advance(10, Exec);
    benchmark::DoNotOptimize(e.states().front().x.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(chains) * 10);
}

void BM_SmoothedGradient(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const SmoothedPotential s = synthetic(d);
  Vec x = Vec::Constant(static_cast<Eigen::Index>(d), 0.3), g(x.size());
  for (auto _ : state) {
    s.gradient(x, g);
    benchmark::DoNotOptimize(g.data());
  }
}

}  // namespace

#define ENSEMBLE_ARGS ->Args({8, 1000})->Args({32, 1000})->Args({64, 1000})->Unit(benchmark::kMillisecond)
BENCHMARK(BM_EnsembleAdvance<SamplerKind::KlmcRm, Execution::Serial>) ENSEMBLE_ARGS;
BENCHMARK(BM_EnsembleAdvance<SamplerKind::KlmcRm, Execution::Parallel>) ENSEMBLE_ARGS;
BENCHMARK(BM_EnsembleAdvance<SamplerKind::Lmc, Execution::Serial>) ENSEMBLE_ARGS;
BENCHMARK(BM_EnsembleAdvance<SamplerKind::Lmc, Execution::Parallel>) ENSEMBLE_ARGS;
BENCHMARK(BM_SmoothedGradient)->Arg(8)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
