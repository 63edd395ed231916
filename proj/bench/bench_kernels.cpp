// Parallel kernels against their serial reference versions.

#include "cobo/reference.hpp"
#include "cobo/objectives.hpp"
#include "cobo/rng.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace cobo;

struct Setup {
  Grid grid;
  std::vector<LocalAgent> agents;
  std::vector<DiscretizedGP> models;
};

Setup make_setup(std::size_t per_axis, int n_agents, int points) {
  Setup s{Grid::uniform(2, per_axis), {}, {}};
  Rng rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (int a = 0; a < n_agents; ++a) {
    LocalAgent agent(a, KernelSpec{}, 0.02);
    for (int i = 0; i < points; ++i) {
      const Point x{u(rng), u(rng)};
      agent.observe({x, eval_f1(x) + noise(rng)});
    }
    s.models.push_back(discretize(agent, s.grid));
    s.agents.push_back(std::move(agent));
  }
  return s;
}

std::vector<Matrix> covariances(const Setup& s) {
  std::vector<Matrix> out;
  for (const auto& m : s.models) out.push_back(m.cov);
  return out;
}

void BM_Discretize(benchmark::State& state) {
  const Setup s = make_setup(static_cast<std::size_t>(state.range(0)), 1, 8);
  for (auto _ : state) benchmark::DoNotOptimize(discretize(s.agents.front(), s.grid));
}

void BM_DiscretizeReference(benchmark::State& state) {
  const Setup s = make_setup(static_cast<std::size_t>(state.range(0)), 1, 8);
  for (auto _ : state) benchmark::DoNotOptimize(reference::discretize(s.agents.front(), s.grid));
}

void BM_Barycenter(benchmark::State& state) {
  const Setup s = make_setup(static_cast<std::size_t>(state.range(0)), 4, 8);
  const auto covs = covariances(s);
  for (auto _ : state) benchmark::DoNotOptimize(covariance_barycenter(covs));
}

void BM_BarycenterReference(benchmark::State& state) {
  const Setup s = make_setup(static_cast<std::size_t>(state.range(0)), 4, 8);
  const auto covs = covariances(s);
  for (auto _ : state) benchmark::DoNotOptimize(reference::covariance_barycenter(covs));
}

void BM_OptimizeCokg(benchmark::State& state) {
  const Setup s = make_setup(static_cast<std::size_t>(state.range(0)), 2, 6);
  const CentralGP central = barycenter(s.models);
  const FantasyDraws draws = FantasyDraws::generate(16, 2, 7);
  AcqConfig cfg;
  cfg.samples = 16;
  cfg.exhaustive_threshold = 1u << 20;
  for (auto _ : state)
    benchmark::DoNotOptimize(optimize_cokg(central.model, s.models, 1.0, cfg, draws, 0.02, 3));
}

void BM_OptimizeCokgReference(benchmark::State& state) {
  const Setup s = make_setup(static_cast<std::size_t>(state.range(0)), 2, 6);
  const CentralGP central = barycenter(s.models);
  const FantasyDraws draws = FantasyDraws::generate(16, 2, 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::optimize_exhaustive(central.model, s.models, 1.0, draws, 0.02));
}

}  // namespace

BENCHMARK(BM_Discretize)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiscretizeReference)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Barycenter)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BarycenterReference)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OptimizeCokg)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OptimizeCokgReference)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
