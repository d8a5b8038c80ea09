#include <benchmark/benchmark.h>

#include "fscap/delay.hpp"
#include "fscap/dual_mdp.hpp"
#include "fscap/graph_bounds.hpp"

using namespace fscap;

namespace {

void BM_Stationary(benchmark::State& state) {
  const auto tc = transform(make_trapdoor(), int(state.range(0)));
  const auto g = markov_qgraph(3, 2);
  const auto pol = uniform_policy(tc.channel, g);
  const auto chain = build_sq_chain(tc.channel, g, pol);
  for (auto _ : state) benchmark::DoNotOptimize(stationary(chain));
  state.SetLabel(std::to_string(tc.channel.state_count * g.node_count) + " pairs");
}
BENCHMARK(BM_Stationary)->DenseRange(2, 4);

void BM_RateAndGradient(benchmark::State& state) {
  const auto tc = transform(make_dec({0.3}), 2);
  const auto g = appendix_c_qgraph();
  const auto pol = uniform_policy(tc.channel, g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rate(tc.channel, g, pol));
    benchmark::DoNotOptimize(rate_gradient(tc.channel, g, pol));
  }
}
BENCHMARK(BM_RateAndGradient);

void BM_UpperBound(benchmark::State& state) {
  const auto tc = transform(make_trapdoor(), 2);
  const auto g = appendix_a_qgraph();
  UpperBoundOptions opts;
  opts.random_starts = 0;
  for (auto _ : state) benchmark::DoNotOptimize(upper_bound(tc, g, opts).value);
}
BENCHMARK(BM_UpperBound)->Unit(benchmark::kMillisecond);

void BM_RelativeValueIteration(benchmark::State& state) {
  const auto c = dec_certificate(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(relative_value_iteration(c.channel.channel, c.graph, c.test).certificate.rho);
}
BENCHMARK(BM_RelativeValueIteration)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
