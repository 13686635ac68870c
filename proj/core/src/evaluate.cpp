#include "opgram/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>

#include "rng.hpp"

namespace opgram {

namespace {

std::vector<std::string> sorted_labels(std::span<const LabeledInstance> instances) {
  std::set<std::string> labels;
  for (const auto& inst : instances) labels.insert(inst.label);
  return {labels.begin(), labels.end()};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> sorted_classes)
    : classes(std::move(sorted_classes)),
      counts(classes.size(), std::vector<std::uint64_t>(classes.size(), 0)) {}

void ConfusionMatrix::add(std::string_view actual, std::string_view predicted,
                          std::uint64_t count) {
  auto index_of = [&](std::string_view label) -> std::size_t {
    auto it = std::lower_bound(classes.begin(), classes.end(), label);
    if (it == classes.end() || *it != label) {
      fail(ErrorKind::InvalidArgument, "label '" + std::string(label) + "' not in matrix classes");
    }
    return static_cast<std::size_t>(it - classes.begin());
  };
  counts[index_of(actual)][index_of(predicted)] += count;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : counts) {
    for (std::uint64_t n : row) sum += n;
  }
  return sum;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes != classes) {
    fail(ErrorKind::DimensionMismatch, "cannot pool confusion matrices over different classes");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts.size(); ++j) counts[i][j] += other.counts[i][j];
  }
  return *this;
}

ClassMetrics precision_recall_f1(const ConfusionMatrix& cm, std::string_view cls) {
  auto it = std::lower_bound(cm.classes.begin(), cm.classes.end(), cls);
  if (it == cm.classes.end() || *it != cls) {
    fail(ErrorKind::InvalidArgument, "label '" + std::string(cls) + "' not in matrix classes");
  }
  const std::size_t c = static_cast<std::size_t>(it - cm.classes.begin());

  std::uint64_t tp = cm.counts[c][c];
  std::uint64_t actual = 0, predicted = 0;
  for (std::size_t i = 0; i < cm.classes.size(); ++i) {
    actual += cm.counts[c][i];
    predicted += cm.counts[i][c];
  }

  ClassMetrics m;
  m.support = actual;
  m.precision = predicted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(predicted);
  m.recall = actual == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(actual);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

double weighted_f_measure(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) fail(ErrorKind::EmptyDistribution, "weighted f-measure of an empty matrix");
  double acc = 0.0;
  for (const auto& cls : cm.classes) {
    ClassMetrics m = precision_recall_f1(cm, cls);
    acc += static_cast<double>(m.support) * m.f1;
  }
  return acc / static_cast<double>(total);
}

FoldSplit stratified_folds(std::span<const LabeledInstance> instances, std::size_t k,
                           std::uint64_t seed) {
  if (k < 2) fail(ErrorKind::InvalidArgument, "fold count must be >= 2");
  if (instances.size() < k) {
    fail(ErrorKind::TooFewInstances,
         std::to_string(instances.size()) + " instances cannot fill " + std::to_string(k) + " folds");
  }

  FoldSplit split;
  split.k = k;
  split.seed = seed;
  split.fold_of.assign(instances.size(), 0);

  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    by_class[instances[i].label].push_back(i);
  }

  // One fold cursor runs across classes so total fold sizes also differ by
  // at most one and no fold is empty when instances >= k.
  detail::SplitMix64 rng(seed);
  std::size_t cursor = 0;
  for (auto& [label, indices] : by_class) {
    detail::shuffle(indices, rng);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      split.fold_of[indices[i]] = static_cast<std::uint32_t>((cursor + i) % k);
    }
    cursor += indices.size();
  }
  return split;
}

CVReport cross_validate(std::span<const LabeledInstance> instances, std::size_t k,
                        std::uint64_t seed, const Trainer& trainer) {
  FoldSplit split = stratified_folds(instances, k, seed);
  const std::vector<std::string> classes = sorted_labels(instances);

  CVReport report;
  report.pooled = ConfusionMatrix(classes);

  for (std::size_t fold = 0; fold < k; ++fold) {
    std::vector<LabeledInstance> train_set;
    std::vector<std::size_t> test_indices;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      if (split.fold_of[i] == fold) {
        test_indices.push_back(i);
      } else {
        train_set.push_back(instances[i]);
      }
    }

    ConfusionMatrix cm(classes);
    FoldTiming timing;

    auto train_start = std::chrono::steady_clock::now();
    Predictor predictor;
    try {
      predictor = trainer(train_set);
    } catch (const Error& e) {
      throw Error(e.kind(), "fold " + std::to_string(fold) + ": " + e.what());
    }
    timing.train_seconds = seconds_since(train_start);

    auto predict_start = std::chrono::steady_clock::now();
    for (std::size_t i : test_indices) {
      cm.add(instances[i].label, predictor(instances[i].vector));
    }
    timing.predict_seconds = seconds_since(predict_start);

    report.pooled += cm;
    report.fold_matrices.push_back(std::move(cm));
    report.fold_timing.push_back(timing);
    report.train_seconds += timing.train_seconds;
    report.predict_seconds += timing.predict_seconds;
  }

  report.weighted_f = weighted_f_measure(report.pooled);
  double mean = 0.0;
  for (const auto& cm : report.fold_matrices) mean += weighted_f_measure(cm);
  report.mean_fold_weighted_f = mean / static_cast<double>(k);
  for (const auto& cls : classes) {
    report.per_class.emplace_back(cls, precision_recall_f1(report.pooled, cls));
  }
  return report;
}

}  // namespace opgram
