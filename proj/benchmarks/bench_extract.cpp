#include <benchmark/benchmark.h>

#include <random>

#include "opgram/ngram.hpp"

using namespace opgram;

namespace {

std::vector<AppRecord> synthetic_corpus(std::size_t apps, std::size_t methods,
                                        std::size_t max_len) {
  std::mt19937_64 rng(1234);
  std::vector<AppRecord> corpus;
  for (std::size_t a = 0; a < apps; ++a) {
    AppRecord app;
    app.id = "app" + std::to_string(a);
    app.label = a % 2 == 0 ? Label::Benign : Label::Malware;
    for (std::size_t m = 0; m < methods; ++m) {
      MethodSequence seq(5 + rng() % (max_len - 4));
      for (auto& b : seq) b = static_cast<OpcodeByte>(1 + rng() % 60);
      app.methods.push_back(std::move(seq));
    }
    corpus.push_back(std::move(app));
  }
  return corpus;
}

}  // namespace

static void BM_BuildVocabulary(benchmark::State& state) {
  const auto corpus = synthetic_corpus(100, 30, 50);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::size_t vocab_size = 0;
  for (auto _ : state) {
    auto vocab = build_vocabulary(corpus, n);
    vocab_size = vocab.size();
    benchmark::DoNotOptimize(vocab);
  }
  state.counters["unique_ngrams"] = static_cast<double>(vocab_size);
}
BENCHMARK(BM_BuildVocabulary)->Arg(2)->Arg(3)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_VectorizeCorpus(benchmark::State& state) {
  const auto corpus = synthetic_corpus(100, 30, 50);
  const auto vocab = build_vocabulary(corpus, 3);
  const Mode mode = state.range(0) == 0 ? Mode::Binary : Mode::Frequency;
  for (auto _ : state) {
    auto instances = vectorize_corpus(corpus, vocab, mode, Task::Detect);
    benchmark::DoNotOptimize(instances);
  }
}
BENCHMARK(BM_VectorizeCorpus)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
