#include <benchmark/benchmark.h>

#include "stcox/gp.hpp"
#include "stcox/mcmc.hpp"
#include "stcox/model.hpp"
#include "stcox/simulate.hpp"

using namespace stcox;

namespace {

SpaceTimeGrid grid(int n, int m) { return {{0.0, 7.0, 0.0, 7.0, {}}, n, n, m, 1}; }

const CovarianceParams kParams{1.0, 0.05, 0.5, 1.0, 1.0, 0.5};

void BM_FactorKronecker(benchmark::State& state) {
  const SpaceTimeGrid g = grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const CovarianceStructure s(g);
  for (auto _ : state) benchmark::DoNotOptimize(s.factor(kParams, CovarianceModel::Separable));
  state.SetLabel(std::to_string(g.n_cells()) + " cells");
}
BENCHMARK(BM_FactorKronecker)->Args({6, 8})->Args({8, 12})->Args({10, 24})->Args({15, 48});

void BM_FactorDense(benchmark::State& state) {
  const SpaceTimeGrid g = grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const CovarianceStructure s(g);
  for (auto _ : state) benchmark::DoNotOptimize(s.factor(kParams, CovarianceModel::Nonseparable));
  state.SetLabel(std::to_string(g.n_cells()) + " cells");
}
BENCHMARK(BM_FactorDense)->Args({6, 8})->Args({8, 12})->Unit(benchmark::kMillisecond);

void BM_Transform(benchmark::State& state) {
  const SpaceTimeGrid g = grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const CovarianceStructure s(g);
  const CovFactor f = s.factor(kParams, state.range(2) ? CovarianceModel::Nonseparable : CovarianceModel::Separable);
  Rng rng(1);
  const Eigen::VectorXd nu = standard_normal_vector(static_cast<Eigen::Index>(g.n_cells()), rng);
  for (auto _ : state) benchmark::DoNotOptimize(f.apply(nu));
}
BENCHMARK(BM_Transform)->Args({8, 12, 0})->Args({8, 12, 1})->Args({10, 24, 0})->Args({15, 48, 0});

void BM_Likelihood(benchmark::State& state) {
  const SpaceTimeGrid g0 = grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  ModelState truth;
  truth.variant = ModelVariant::LgcpSeparable;
  truth.temporal = TemporalParams::uniform(1, 2.0, 0.5);
  truth.cov = kParams;
  truth.cov.gamma = 0.0;
  Rng rng(2);
  const SpaceTimeGrid g = simulate_pattern({truth, g0, 2, false}, rng).grid;
  const GridLikelihood lik(g);
  const Eigen::VectorXd l0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.n_spatial()));
  const Eigen::VectorXd z = standard_normal_vector(static_cast<Eigen::Index>(g.n_cells()), rng);
  for (auto _ : state) benchmark::DoNotOptimize(lik.evaluate(l0, &z, 1.0, truth.temporal));
}
BENCHMARK(BM_Likelihood)->Args({10, 24})->Args({15, 48});

void BM_Sweep(benchmark::State& state) {
  const SpaceTimeGrid g0 = grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const auto variant = state.range(2) ? ModelVariant::LgcpNonseparable : ModelVariant::LgcpSeparable;
  ModelState truth;
  truth.variant = variant;
  truth.temporal = TemporalParams::uniform(1, 2.0, 0.5);
  truth.cov = kParams;
  if (variant == ModelVariant::LgcpSeparable) truth.cov.gamma = 0.0;
  Rng rng(3);
  const SpaceTimeGrid g = simulate_pattern({truth, g0, 3, false}, rng).grid;
  FitSpec spec;
  spec.variant = variant;
  spec.covariance = truth.cov;
  Sampler sampler(g, spec, rng);
  for (auto _ : state) sampler.sweep(rng);
}
BENCHMARK(BM_Sweep)->Args({10, 24, 0})->Args({6, 8, 1})->Args({8, 12, 1});

}  // namespace
BENCHMARK_MAIN();
