#include <benchmark/benchmark.h>

#include <algorithm>

#include "sdmrt/generator.hpp"
#include "sdmrt/metrics.hpp"
#include "sdmrt/models.hpp"
#include "sdmrt/random.hpp"

using namespace sdmrt;

namespace {

const SyntheticData& task() {
  static const SyntheticData data = generate_synthetic(
      {.source_vocab_size = 12, .synonyms_per_token = 2, .corpus_size = 2000, .seed = 1});
  return data;
}

std::vector<Sentence> noisy_copies(const std::vector<Sentence>& refs, std::uint64_t seed) {
  Rng rng(seed);
  auto out = refs;
  for (auto& s : out)
    for (auto& t : s)
      if (rng.bernoulli(0.3)) t = refs.front().front();
  return out;
}

void BM_Bleu(benchmark::State& state) {
  auto refs = task().corpus.targets();
  refs.resize(static_cast<std::size_t>(state.range(0)));
  auto hyps = noisy_copies(refs, 7);
  for (auto _ : state) benchmark::DoNotOptimize(bleu(hyps, refs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Bleu)->Arg(100)->Arg(1000);

void BM_Ter(benchmark::State& state) {
  auto refs = task().corpus.targets();
  auto hyps = noisy_copies(refs, 9);
  for (auto& h : hyps) std::reverse(h.begin(), h.end());
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ter(hyps[i], refs[i]));
    i = (i + 1) % refs.size();
  }
}
BENCHMARK(BM_Ter);

void BM_Decode(benchmark::State& state) {
  auto kind = static_cast<ModelKind>(state.range(0));
  auto model = TranslationModel::train(kind, task().corpus);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode(model, task().corpus[i].source));
    i = (i + 1) % task().corpus.size();
  }
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_Decode)->Arg(0)->Arg(1)->Arg(2);

void BM_Train(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(TranslationModel::train(ModelKind::NAT, task().corpus));
}
BENCHMARK(BM_Train)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
