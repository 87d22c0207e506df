#include <vector>

#include <benchmark/benchmark.h>

#include "brlstm/activation.hpp"
#include "brlstm/lstm.hpp"
#include "brlstm/metrics.hpp"

using namespace brlstm;

static void BM_BrownianForward(benchmark::State& state) {
  const auto sampling = state.range(1) ? Sampling::explicit_paths : Sampling::collapsed;
  const auto kind = ActivationKind::brownian(static_cast<int>(state.range(0)), sampling);
  Matrix x(64, 1);
  RngStream gen(1, 1);
  for (double& v : x.values()) v = gen.uniform(-2.0, 2.0);
  std::uint64_t call = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(kind, x, 0.25, RngStream(7, call++)).output);
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_BrownianForward)->Args({1000, 0})->Args({1000, 1})->Args({100, 1});

static void BM_SequenceForwardBackward(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  const LstmParams p = init_params(1, hidden, 1, 3);
  Matrix seq(60, 1);
  RngStream gen(2, 2);
  for (double& v : seq.values()) v = gen.uniform();
  const auto act = ActivationKind::brownian(1000);
  std::uint64_t call = 0;
  for (auto _ : state) {
    const auto out = sequence_forward(p, seq, act, Head::regression, RngStream(9, call++));
    benchmark::DoNotOptimize(backward_bptt(p, out.trace, Matrix(1, 1, 1.0)));
  }
}
BENCHMARK(BM_SequenceForwardBackward)->Arg(16)->Arg(50);

static void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> s(n);
  std::vector<int> l(n);
  RngStream gen(3, 3);
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = gen.uniform();
    l[k] = gen.uniform() < 0.25;
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(s, l));
}
BENCHMARK(BM_RocAuc)->Arg(10000);
BENCHMARK_MAIN();
