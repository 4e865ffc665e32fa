#include <benchmark/benchmark.h>

#include "popproto/composer.hpp"
#include "popproto/protolib.hpp"
#include "popproto/verifier.hpp"

using namespace popproto;

static void BM_ParityGraph(benchmark::State& state) {
  const auto& p = builtin("parity").protocol();
  const auto n = static_cast<std::uint32_t>(state.range(0));
  const auto r = static_cast<std::uint32_t>(state.range(1));
  std::size_t nodes = 0;
  for (auto _ : state) {
    auto g = build_graph(p, {n, r});
    nodes = g.size();
    benchmark::DoNotOptimize(g.bottom_sccs());
  }
  state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_ParityGraph)->Args({5, 2})->Args({8, 2})->Args({12, 3})->Unit(benchmark::kMillisecond);

static void BM_ParityShutdownCheck(benchmark::State& state) {
  const auto& p = builtin("parity").protocol();
  VerifyOptions o;
  o.max_population = static_cast<std::uint32_t>(state.range(0));
  o.max_requests = 2;
  o.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(check_implements_spec_with_shutdown(p, builtin("spec:parity").spec(), o));
}
BENCHMARK(BM_ParityShutdownCheck)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_Compose(benchmark::State& state) {
  const auto& a = builtin("parity").protocol();
  const auto& b = builtin("identity3").protocol();
  for (auto _ : state) benchmark::DoNotOptimize(compose_protocols(a, b));
}
BENCHMARK(BM_Compose)->Unit(benchmark::kMillisecond);

static void BM_ComposedGraph(benchmark::State& state) {
  auto p = compose_protocols(builtin("parity").protocol(), builtin("identity3").protocol());
  const auto n = static_cast<std::uint32_t>(state.range(0));
  std::size_t nodes = 0;
  for (auto _ : state) {
    auto g = build_graph(p, {n, 1});
    nodes = g.size();
    benchmark::DoNotOptimize(g.bottom_sccs());
  }
  state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_ComposedGraph)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_Simulate(benchmark::State& state) {
  const auto& p = builtin("parity").protocol();
  const auto n = static_cast<std::uint32_t>(state.range(0));
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  for (auto _ : state) {
    RunOptions o;
    o.seed = seed++;
    AgentConfiguration init;
    for (AgentId a = 1; a <= n; ++a) init[a] = *p.find_state("ODD");
    auto t = run(p, init, {}, o);
    steps += t.length();
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Simulate)->Arg(10)->Arg(100);

static void BM_EvalComposed(benchmark::State& state) {
  auto cs = make_composed(std::get<Spec>(builtin("spec:parity").spec()), std::get<Spec>(builtin("spec:identity3").spec()));
  PairMultiset m;
  m.add("ODD", "ODD", 1);
  m.add("ODD", "odd", static_cast<std::uint32_t>(state.range(0)) - 1);
  for (auto _ : state) benchmark::DoNotOptimize(eval_composed(cs, m));
}
BENCHMARK(BM_EvalComposed)->Arg(4)->Arg(8);

BENCHMARK_MAIN();
