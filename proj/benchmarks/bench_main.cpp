#include <benchmark/benchmark.h>

#include <random>

#include "statealign/align.hpp"
#include "statealign/pipeline.hpp"
#include "statealign/simulate.hpp"

namespace sa = statealign;

namespace {

sa::StateSequence random_sequence(std::mt19937_64& rng, std::size_t n) {
  sa::StateSequence s;
  s.alphabet = sa::StateAlphabet::three_state();
  std::uniform_int_distribution<int> pick(0, 2);
  for (std::size_t i = 0; i < n; ++i) s.states.push_back(pick(rng));
  return s;
}

void BM_Dtw(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_sequence(rng, n);
  const auto b = random_sequence(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(sa::dtw_cost(a.states, b.states));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dtw)->RangeMultiplier(2)->Range(32, 1024)->Complexity(benchmark::oNSquared);

void BM_CausalityIndex(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_sequence(rng, n);
  const auto b = random_sequence(rng, n);
  const int tau_max = sa::default_tau_max(n);
  for (auto _ : state) benchmark::DoNotOptimize(sa::causality_index(a, b, tau_max));
}
BENCHMARK(BM_CausalityIndex)->Arg(50)->Arg(200);

void BM_Pairwise(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<sa::StateSequence> seqs;
  for (int i = 0; i < state.range(0); ++i) seqs.push_back(random_sequence(rng, 50));
  for (auto _ : state) benchmark::DoNotOptimize(sa::pairwise_alignment(seqs, 12));
}
BENCHMARK(BM_Pairwise)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Pipeline(benchmark::State& state) {
  const auto ds = sa::generate_dataset(sa::SimSpec{}, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(sa::run_pipeline(sa::PipelineConfig{}, ds.segments));
}
BENCHMARK(BM_Pipeline)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
