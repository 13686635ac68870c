#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "opgram/ngram.hpp"

namespace opgram {

struct ConfusionMatrix {
  std::vector<std::string> classes;                 // sorted
  std::vector<std::vector<std::uint64_t>> counts;   // [actual][predicted]

  explicit ConfusionMatrix(std::vector<std::string> sorted_classes = {});

  void add(std::string_view actual, std::string_view predicted, std::uint64_t count = 1);
  std::uint64_t total() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

/// Per-class precision/recall/f1 with the 0/0 -> 0 convention.
ClassMetrics precision_recall_f1(const ConfusionMatrix& cm, std::string_view cls);

/// Support-weighted mean of per-class f1: sum(support_c * f1_c) / total.
double weighted_f_measure(const ConfusionMatrix& cm);

/// Per-class seeded shuffle, then round-robin dealing, so per-class fold
/// sizes differ by at most one.
struct FoldSplit {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> fold_of;  // parallel to the instance span
};

FoldSplit stratified_folds(std::span<const LabeledInstance> instances, std::size_t k,
                           std::uint64_t seed);

using Predictor = std::function<std::string(const SparseVector&)>;
using Trainer = std::function<Predictor(const std::vector<LabeledInstance>&)>;

struct FoldTiming {
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
};

struct CVReport {
  std::vector<ConfusionMatrix> fold_matrices;
  ConfusionMatrix pooled;
  double weighted_f = 0.0;            // pooled matrix, the headline number
  double mean_fold_weighted_f = 0.0;  // per-fold view
  std::vector<std::pair<std::string, ClassMetrics>> per_class;  // from pooled
  std::vector<FoldTiming> fold_timing;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
};

/// k-fold cross validation: train on k-1 folds, score the held-out fold,
/// pool the confusion matrices. Trainer errors are rethrown with the fold
/// index attached.
CVReport cross_validate(std::span<const LabeledInstance> instances, std::size_t k,
                        std::uint64_t seed, const Trainer& trainer);

}  // namespace opgram
