#include <benchmark/benchmark.h>

#include <cmath>

#include "neurotrig/rbfnn.hpp"
#include "neurotrig/sim.hpp"
#include "neurotrig/topology.hpp"
#include "neurotrig/trigger.hpp"

using namespace neurotrig;

static void BM_BasisEval(benchmark::State& state) {
  const Scenario demo = Scenario::demo();
  const GaussianNetwork net = demo.basis.network(static_cast<std::size_t>(state.range(0)));
  Eigen::VectorXd x = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(net.input_dim()), 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.eval(x));
  }
}
BENCHMARK(BM_BasisEval)->Arg(1)->Arg(2);

static void BM_ProcessSample(benchmark::State& state) {
  TriggerChannel channel(SignalId::state(1, 1), 0.01, 0.0);
  double t = 0.0;
  for (auto _ : state) {
    t += 0.001;
    benchmark::DoNotOptimize(channel.process_sample(t, std::sin(t)));
  }
}
BENCHMARK(BM_ProcessSample);

static void BM_MinEigenvalue(benchmark::State& state) {
  const DirectedTopology ring = Scenario::demo().topology;
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_eigenvalue(q_matrix(ring)));
  }
}
BENCHMARK(BM_MinEigenvalue);

static void BM_DemoRun(benchmark::State& state) {
  Scenario s = Scenario::demo();
  s.run.horizon = 5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(s));
  }
}
BENCHMARK(BM_DemoRun)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
