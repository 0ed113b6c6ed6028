#include <benchmark/benchmark.h>

#include "entest/harness.hpp"

namespace {

using namespace entest;

RiskRequest request(EstimatorId id) {
  RiskRequest r;
  r.estimator = id;
  r.n = 1000;
  r.trials = 64;
  r.seed = 7;
  return r;
}

const DiscreteDistribution& uniform() {
  static const DiscreteDistribution p = make_family({family::Uniform{2000}, {}});
  return p;
}

void BM_McRiskSerial(benchmark::State& state) {
  const auto req = request(static_cast<EstimatorId>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mc_risk_serial(uniform(), req).mse);
}

void BM_McRiskParallel(benchmark::State& state) {
  const auto req = request(static_cast<EstimatorId>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(mc_risk(uniform(), req, threads).mse);
}

}  // namespace

BENCHMARK(BM_McRiskSerial)->Arg(0)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McRiskParallel)->ArgsProduct({{0, 2}, {1, 2, 4, 8}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
