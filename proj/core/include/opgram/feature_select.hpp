#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "opgram/ngram.hpp"

namespace opgram {

/// Class-label counts. Order is the sorted-label order of the corpus.
using ClassDistribution = std::vector<std::uint64_t>;

/// Shannon entropy in bits over raw counts, with the 0*log0 = 0 convention.
/// Throws EmptyDistribution when the counts sum to zero.
double entropy(std::span<const std::uint64_t> counts);

/// Per-feature (value, class) count table. Rows are feature values, columns
/// are classes in sorted-label order.
struct ContingencyTable {
  std::vector<std::vector<std::uint64_t>> cells;

  std::vector<std::uint64_t> class_marginal() const;
  std::vector<std::uint64_t> value_marginal() const;
  std::uint64_t total() const;
};

/// H(class | feature value) in bits.
double conditional_entropy(const ContingencyTable& table);

/// H(class) - H(class | feature); clamped to 0 against rounding.
double information_gain(const ContingencyTable& table);

struct IGScore {
  std::uint32_t feature_id = 0;
  std::string key;
  double ig = 0.0;
};

/// Contiguous feature-id ranges covering [0, vocabulary size). Segments are
/// independent scoring units; any plan yields identical scores.
struct SegmentPlan {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ranges;  // [begin, end)

  static SegmentPlan single(std::uint32_t vocab_size);
  static SegmentPlan uniform(std::uint32_t vocab_size, std::uint32_t segment_size);
  /// Sizes segments so the dense per-segment counting state stays within
  /// `budget_bytes`.
  static SegmentPlan for_budget(std::uint32_t vocab_size, std::size_t num_classes,
                                std::uint64_t budget_bytes);

  void validate(std::uint32_t vocab_size) const;
};

/// Contingency table of one feature over the instances. In binary mode the
/// value domain is {0, 1} with absence counted as 0. In frequency mode the
/// observed counts are discretized by the best single threshold: candidates
/// are midpoints between consecutive distinct values (0 included for absent
/// features) and the split maximizing information gain wins.
ContingencyTable feature_table(std::span<const LabeledInstance> instances,
                               std::uint32_t feature_id, Mode mode);

/// Scores every vocabulary feature segment by segment and returns the scores
/// sorted by (ig descending, key ascending). Numerically identical to a
/// single-segment run for every plan and thread count.
std::vector<IGScore> segmented_ig(std::span<const LabeledInstance> instances,
                                  const NGramVocabulary& vocab, const SegmentPlan& plan,
                                  Mode mode, unsigned threads = 1);

struct SelectionCriterion {
  std::optional<double> ig_threshold;  // keep ig > threshold
  std::optional<std::size_t> k;        // keep the k best

  static SelectionCriterion threshold(double t);
  static SelectionCriterion top_k(std::size_t k);
};

/// Survivors ordered by (ig descending, key ascending).
std::vector<std::pair<std::uint32_t, std::string>> select_features(
    std::span<const IGScore> scores, const SelectionCriterion& criterion);

}  // namespace opgram
