#include "coloc/engine.hpp"
#include "coloc/evaluation.hpp"
#include "coloc/experiments.hpp"
#include "coloc/local_solver.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace coloc;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

LocalProblem random_problem(std::mt19937_64& rng, int deg, CostMode mode) {
  std::uniform_real_distribution<double> u(0.0, 1.0), ur(0.05, 0.8);
  LocalProblem p;
  p.own_target = v2(u(rng), u(rng));
  p.penalty = 0.1;
  p.mode = mode;
  for (int k = 0; k < deg; ++k) p.neighbors.push_back({v2(u(rng), u(rng)), ur(rng), std::nullopt});
  return p;
}

Network scenario_net(const char* name) {
  const Scenario sc = named_scenario(name);
  return scenario_network(sc, scenario_layout(sc), 1);
}

void BM_AnchorReplicaUpdate(benchmark::State& state) {
  const Vec a = v2(0.2, 0.3), y = v2(0.9, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(anchor_replica_update(a, y, 0.4, 0.1, CostMode::NonConvex));
  }
}
BENCHMARK(BM_AnchorReplicaUpdate);

void BM_ReducedSolve(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::vector<LocalProblem> problems;
  for (int k = 0; k < 64; ++k) {
    problems.push_back(random_problem(rng, static_cast<int>(state.range(0)),
                                      k % 2 ? CostMode::Convex : CostMode::NonConvex));
  }
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(reduced_solve(problems[k++ % problems.size()]));
  }
}
BENCHMARK(BM_ReducedSolve)->Arg(2)->Arg(6)->Arg(12);

void BM_EngineIterate(benchmark::State& state, const char* scenario, Algorithm alg) {
  const Network net = scenario_net(scenario);
  EngineConfig cfg = configure(alg, named_scenario(scenario).engine);
  cfg.threads = 1;
  for (auto _ : state) {
    state.PauseTiming();
    Engine engine(net, cfg);
    state.ResumeTiming();
    for (int t = 0; t < 10; ++t) benchmark::DoNotOptimize(engine.iterate());
  }
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK_CAPTURE(BM_EngineIterate, n40_hybrid, "n40-sigma01", Algorithm::kAdmmH);
BENCHMARK_CAPTURE(BM_EngineIterate, n40_sf, "n40-sigma01", Algorithm::kAdmmSf);
BENCHMARK_CAPTURE(BM_EngineIterate, n500_hybrid, "n500", Algorithm::kAdmmH)->Unit(benchmark::kMillisecond);

void BM_Nesterov(benchmark::State& state) {
  const Network net = scenario_net("n40-sigma01");
  for (auto _ : state) benchmark::DoNotOptimize(nesterov_sf(net, 100));
}
BENCHMARK(BM_Nesterov)->Unit(benchmark::kMillisecond);

void BM_Crlb(benchmark::State& state) {
  const Network net = scenario_net("n500");
  for (auto _ : state) benchmark::DoNotOptimize(crlb_rmse(net, 0.1));
}
BENCHMARK(BM_Crlb)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
