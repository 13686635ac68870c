#include <benchmark/benchmark.h>

#include <random>

#include "opgram/feature_select.hpp"

using namespace opgram;

namespace {

struct Fixture {
  NGramVocabulary vocab;
  std::vector<LabeledInstance> instances;
};

// ~20k features over 200 instances, sparse frequency vectors.
Fixture make_fixture(std::size_t features, std::size_t instances) {
  std::mt19937_64 rng(99);
  const char* hex = "0123456789abcdef";
  std::vector<std::string> keys;
  keys.reserve(features);
  for (std::size_t i = 0; i < features; ++i) {
    std::string key(6, '0');
    for (int d = 0; d < 6; ++d) key[d] = hex[(i >> (20 - 4 * d)) & 0xF];
    keys.push_back(key);
  }
  Fixture f{NGramVocabulary(3, std::move(keys)), {}};
  for (std::size_t i = 0; i < instances; ++i) {
    LabeledInstance inst;
    inst.app_id = "app" + std::to_string(i);
    inst.label = i % 2 == 0 ? "benign" : "malware";
    inst.vector.mode = Mode::Frequency;
    for (std::uint32_t id = 0; id < features; ++id) {
      if (rng() % 20 == 0) inst.vector.entries.emplace_back(id, 1 + rng() % 9);
    }
    f.instances.push_back(std::move(inst));
  }
  return f;
}

}  // namespace

// Segmentation is about memory, not speed: scoring cost should stay flat as
// the segment count grows.
static void BM_SegmentedIG(benchmark::State& state) {
  static const Fixture f = make_fixture(20000, 200);
  const auto segment_size = static_cast<std::uint32_t>(state.range(0));
  const auto plan = SegmentPlan::uniform(static_cast<std::uint32_t>(f.vocab.size()), segment_size);
  for (auto _ : state) {
    auto scores = segmented_ig(f.instances, f.vocab, plan, Mode::Frequency);
    benchmark::DoNotOptimize(scores);
  }
  state.counters["segments"] = static_cast<double>(plan.ranges.size());
}
BENCHMARK(BM_SegmentedIG)->Arg(20000)->Arg(2000)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_SegmentedIGThreads(benchmark::State& state) {
  static const Fixture f = make_fixture(20000, 200);
  const auto plan = SegmentPlan::uniform(static_cast<std::uint32_t>(f.vocab.size()), 1000);
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    auto scores = segmented_ig(f.instances, f.vocab, plan, Mode::Frequency, threads);
    benchmark::DoNotOptimize(scores);
  }
}
BENCHMARK(BM_SegmentedIGThreads)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
