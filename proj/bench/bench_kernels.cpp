// Serial reference kernels against their OpenMP forms. Arg 0 = serial,
// 1 = parallel.

#include <benchmark/benchmark.h>

#include <random>

#include "nnverify/bench_data.hpp"
#include "nnverify/verifier.hpp"

using namespace nnverify;

namespace {

const std::string data_dir = NNVERIFY_DATA_DIR;

Exec exec_of(const benchmark::State &state) {
  return state.range(0) ? Exec::parallel : Exec::serial;
}

std::vector<std::vector<double>> bench_inputs() {
  std::vector<std::vector<double>> inputs;
  BenchOptions opts;
  opts.noisy_per_vowel = 200;
  opts.non_vocalic = 1000;
  for (const auto &f : generate_bench(opts))
    inputs.push_back(f.image);
  return inputs;
}

void BM_gemm(benchmark::State &state) {
  const FxpFormat f(16, 16);
  const auto n = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2, 2);
  Matrix<FxpValue> a(n, n, from_real(0.0, f)), b(n, n, from_real(0.0, f));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      a(i, j) = from_real(u(rng), f);
      b(i, j) = from_real(u(rng), f);
    }
  for (auto _ : state)
    benchmark::DoNotOptimize(gemm_fxp(a, b, f, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n * n));
}
BENCHMARK(BM_gemm)->ArgsProduct({{0, 1}, {64, 256}})->Unit(benchmark::kMillisecond);

void BM_forward_float(benchmark::State &state) {
  const auto net = load_nnet(data_dir + "/vocalic.nnet");
  const auto inputs = bench_inputs();
  for (auto _ : state)
    benchmark::DoNotOptimize(forward_float_batch(net, inputs, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(inputs.size()));
}
BENCHMARK(BM_forward_float)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_forward_fxp(benchmark::State &state) {
  const auto net = load_nnet(data_dir + "/vocalic.nnet");
  const QuantizedNetwork q(net, FxpFormat(32, 32));
  const auto inputs = bench_inputs();
  for (auto _ : state)
    benchmark::DoNotOptimize(forward_fxp_batch(q, inputs, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(inputs.size()));
}
BENCHMARK(BM_forward_fxp)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_conformance(benchmark::State &state) {
  const auto net = load_nnet(data_dir + "/vocalic.nnet");
  const auto inputs = bench_inputs();
  ConformanceOptions opts;
  opts.exec = exec_of(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(conformance_diff(net, inputs, FxpFormat(8, 8), opts));
}
BENCHMARK(BM_conformance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// Search with no witness, so both forms explore the whole tree.
void BM_verify(benchmark::State &state) {
  const auto net = load_nnet(data_dir + "/vocalic.nnet");
  const AdversarialRobustness p{vowel_bitmap('U'), 1.0, vowel_class('U'), 0.5};
  const auto region = adversarial_region(p, Box(25, Interval(0, 1)),
                                         std::vector<double>(25, 1.0));
  VerifyConfig cfg;
  cfg.parallel = state.range(0) != 0;
  cfg.use_invariants = false;
  std::uint64_t nodes = 0;
  for (auto _ : state) {
    const auto v = incremental_verify(net, p, region, cfg);
    nodes = v.stats.nodes_explored;
    benchmark::DoNotOptimize(v);
  }
  state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_verify)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
