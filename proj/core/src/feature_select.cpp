#include "opgram/feature_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "parallel.hpp"

namespace opgram {

namespace {

// Count-based form of the entropy: log2(N) - (sum n*log2(n)) / N. Exact for
// pure and uniform distributions, which keeps the perfect-predictor bound
// tight.
double entropy_of_counts(std::span<const std::uint64_t> counts, std::uint64_t total) {
  double acc = 0.0;
  for (std::uint64_t n : counts) {
    if (n > 0) acc += static_cast<double>(n) * std::log2(static_cast<double>(n));
  }
  return std::log2(static_cast<double>(total)) - acc / static_cast<double>(total);
}

// Sorted (value, per-class counts) rows for one feature, absence included as
// value 0. Class order is the caller's sorted-label order.
using ValueCounts = std::vector<std::pair<std::uint64_t, std::vector<std::uint64_t>>>;

ContingencyTable best_split_table(const ValueCounts& rows, std::size_t num_classes) {
  ContingencyTable table;
  if (rows.size() <= 1) {
    // Constant feature: a single row, IG will be 0.
    table.cells.push_back(rows.empty() ? std::vector<std::uint64_t>(num_classes, 0)
                                       : rows[0].second);
    return table;
  }

  // Prefix sums over rows in ascending value order give every candidate
  // threshold split in one pass.
  std::vector<std::uint64_t> low(num_classes, 0), all(num_classes, 0);
  for (const auto& [value, counts] : rows) {
    for (std::size_t c = 0; c < num_classes; ++c) all[c] += counts[c];
  }

  double best_ig = -1.0;
  std::vector<std::uint64_t> best_low;
  for (std::size_t r = 0; r + 1 < rows.size(); ++r) {
    for (std::size_t c = 0; c < num_classes; ++c) low[c] += rows[r].second[c];
    ContingencyTable candidate;
    candidate.cells.push_back(low);
    std::vector<std::uint64_t> high(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) high[c] = all[c] - low[c];
    candidate.cells.push_back(std::move(high));
    double ig = information_gain(candidate);
    if (ig > best_ig) {
      best_ig = ig;
      best_low = low;
    }
  }

  table.cells.push_back(best_low);
  std::vector<std::uint64_t> high(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) high[c] = all[c] - best_low[c];
  table.cells.push_back(std::move(high));
  return table;
}

ContingencyTable table_from_value_counts(const ValueCounts& rows, std::size_t num_classes,
                                         Mode mode) {
  if (mode == Mode::Binary) {
    // Domain is {0, 1}; rows already hold at most those two values.
    ContingencyTable table;
    for (const auto& [value, counts] : rows) table.cells.push_back(counts);
    if (table.cells.empty()) table.cells.push_back(std::vector<std::uint64_t>(num_classes, 0));
    return table;
  }
  return best_split_table(rows, num_classes);
}

std::vector<std::string> sorted_labels(std::span<const LabeledInstance> instances) {
  std::set<std::string> labels;
  for (const auto& inst : instances) labels.insert(inst.label);
  return {labels.begin(), labels.end()};
}

}  // namespace

double entropy(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (std::uint64_t n : counts) total += n;
  if (total == 0) fail(ErrorKind::EmptyDistribution, "entropy of an empty distribution");
  return entropy_of_counts(counts, total);
}

std::vector<std::uint64_t> ContingencyTable::class_marginal() const {
  std::vector<std::uint64_t> marginal;
  for (const auto& row : cells) {
    if (marginal.size() < row.size()) marginal.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) marginal[c] += row[c];
  }
  return marginal;
}

std::vector<std::uint64_t> ContingencyTable::value_marginal() const {
  std::vector<std::uint64_t> marginal;
  marginal.reserve(cells.size());
  for (const auto& row : cells) {
    std::uint64_t sum = 0;
    for (std::uint64_t n : row) sum += n;
    marginal.push_back(sum);
  }
  return marginal;
}

std::uint64_t ContingencyTable::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : cells) {
    for (std::uint64_t n : row) sum += n;
  }
  return sum;
}

double conditional_entropy(const ContingencyTable& table) {
  const std::uint64_t grand = table.total();
  if (grand == 0) fail(ErrorKind::EmptyDistribution, "conditional entropy of an empty table");
  double acc = 0.0;
  for (const auto& row : table.cells) {
    std::uint64_t row_total = 0;
    for (std::uint64_t n : row) row_total += n;
    if (row_total == 0) continue;
    double weight = static_cast<double>(row_total) / static_cast<double>(grand);
    acc += weight * entropy_of_counts(row, row_total);
  }
  return acc;
}

double information_gain(const ContingencyTable& table) {
  const std::uint64_t grand = table.total();
  if (grand == 0) fail(ErrorKind::EmptyDistribution, "information gain of an empty table");
  auto marginal = table.class_marginal();
  double ig = entropy_of_counts(marginal, grand) - conditional_entropy(table);
  return ig < 0.0 ? 0.0 : ig;
}

SegmentPlan SegmentPlan::single(std::uint32_t vocab_size) {
  SegmentPlan plan;
  if (vocab_size > 0) plan.ranges.emplace_back(0, vocab_size);
  return plan;
}

SegmentPlan SegmentPlan::uniform(std::uint32_t vocab_size, std::uint32_t segment_size) {
  if (segment_size == 0) fail(ErrorKind::InvalidArgument, "segment size must be >= 1");
  SegmentPlan plan;
  for (std::uint32_t begin = 0; begin < vocab_size; begin += segment_size) {
    plan.ranges.emplace_back(begin, std::min(vocab_size, begin + segment_size));
  }
  return plan;
}

SegmentPlan SegmentPlan::for_budget(std::uint32_t vocab_size, std::size_t num_classes,
                                    std::uint64_t budget_bytes) {
  // Rough model of the per-feature counting state: a handful of distinct
  // values, each holding one 8-byte counter per class, plus map overhead.
  const std::uint64_t bytes_per_feature =
      std::max<std::uint64_t>(1, 16 * (num_classes * 8 + 48));
  std::uint64_t size = std::max<std::uint64_t>(1, budget_bytes / bytes_per_feature);
  size = std::min<std::uint64_t>(size, std::numeric_limits<std::uint32_t>::max());
  return uniform(vocab_size, static_cast<std::uint32_t>(size));
}

void SegmentPlan::validate(std::uint32_t vocab_size) const {
  std::uint32_t expected = 0;
  for (const auto& [begin, end] : ranges) {
    if (begin != expected || end <= begin || end > vocab_size) {
      fail(ErrorKind::InvalidArgument, "segment plan does not tile [0, vocabulary size)");
    }
    expected = end;
  }
  if (expected != vocab_size) {
    fail(ErrorKind::InvalidArgument, "segment plan does not cover the vocabulary");
  }
}

ContingencyTable feature_table(std::span<const LabeledInstance> instances,
                               std::uint32_t feature_id, Mode mode) {
  if (instances.empty()) fail(ErrorKind::EmptyDistribution, "no instances to tabulate");
  auto labels = sorted_labels(instances);
  const std::size_t num_classes = labels.size();

  std::map<std::uint64_t, std::vector<std::uint64_t>> by_value;
  std::vector<std::uint64_t> class_totals(num_classes, 0);
  for (const auto& inst : instances) {
    std::size_t c = static_cast<std::size_t>(
        std::lower_bound(labels.begin(), labels.end(), inst.label) - labels.begin());
    ++class_totals[c];
    std::uint64_t value = 0;
    for (const auto& [id, v] : inst.vector.entries) {
      if (id == feature_id) {
        value = v;
        break;
      }
      if (id > feature_id) break;
    }
    if (value > 0) {
      auto& row = by_value[value];
      if (row.empty()) row.resize(num_classes, 0);
      ++row[c];
    }
  }

  ValueCounts rows;
  std::vector<std::uint64_t> zeros = class_totals;
  std::uint64_t zero_total = 0;
  for (auto& [value, counts] : by_value) {
    for (std::size_t c = 0; c < num_classes; ++c) zeros[c] -= counts[c];
  }
  for (std::uint64_t z : zeros) zero_total += z;
  if (zero_total > 0) rows.emplace_back(0, zeros);
  for (auto& [value, counts] : by_value) rows.emplace_back(value, std::move(counts));

  return table_from_value_counts(rows, num_classes, mode);
}

std::vector<IGScore> segmented_ig(std::span<const LabeledInstance> instances,
                                  const NGramVocabulary& vocab, const SegmentPlan& plan,
                                  Mode mode, unsigned threads) {
  if (instances.empty()) fail(ErrorKind::EmptyDistribution, "no instances to score");
  plan.validate(static_cast<std::uint32_t>(vocab.size()));
  for (const auto& inst : instances) {
    if (inst.vector.mode != mode) {
      fail(ErrorKind::ModeMismatch, "instance '" + inst.app_id + "' does not match scoring mode");
    }
  }

  auto labels = sorted_labels(instances);
  const std::size_t num_classes = labels.size();
  std::vector<std::uint64_t> class_totals(num_classes, 0);
  std::vector<std::size_t> class_of(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    std::size_t c = static_cast<std::size_t>(
        std::lower_bound(labels.begin(), labels.end(), instances[i].label) - labels.begin());
    class_of[i] = c;
    ++class_totals[c];
  }

  std::vector<IGScore> scores(vocab.size());
  detail::parallel_for(plan.ranges.size(), threads, [&](std::size_t s) {
    const auto [lo, hi] = plan.ranges[s];
    std::vector<std::map<std::uint64_t, std::vector<std::uint64_t>>> acc(hi - lo);

    for (std::size_t i = 0; i < instances.size(); ++i) {
      const std::size_t c = class_of[i];
      const auto& entries = instances[i].vector.entries;
      auto it = std::lower_bound(entries.begin(), entries.end(), lo,
                                 [](const auto& entry, std::uint32_t id) {
                                   return entry.first < id;
                                 });
      for (; it != entries.end() && it->first < hi; ++it) {
        auto& row = acc[it->first - lo][it->second];
        if (row.empty()) row.resize(num_classes, 0);
        ++row[c];
      }
    }

    for (std::uint32_t f = lo; f < hi; ++f) {
      auto& by_value = acc[f - lo];
      ValueCounts rows;
      std::vector<std::uint64_t> zeros = class_totals;
      std::uint64_t zero_total = 0;
      for (auto& [value, counts] : by_value) {
        for (std::size_t c = 0; c < num_classes; ++c) zeros[c] -= counts[c];
      }
      for (std::uint64_t z : zeros) zero_total += z;
      if (zero_total > 0) rows.emplace_back(0, std::move(zeros));
      for (auto& [value, counts] : by_value) rows.emplace_back(value, std::move(counts));

      ContingencyTable table = table_from_value_counts(rows, num_classes, mode);
      scores[f] = IGScore{f, vocab.key_of(f), information_gain(table)};
    }
  });

  std::sort(scores.begin(), scores.end(), [](const IGScore& a, const IGScore& b) {
    if (a.ig != b.ig) return a.ig > b.ig;
    return a.key < b.key;
  });
  return scores;
}

SelectionCriterion SelectionCriterion::threshold(double t) {
  if (t < 0.0) fail(ErrorKind::InvalidArgument, "IG threshold must be >= 0");
  SelectionCriterion c;
  c.ig_threshold = t;
  return c;
}

SelectionCriterion SelectionCriterion::top_k(std::size_t k) {
  SelectionCriterion c;
  c.k = k;
  return c;
}

std::vector<std::pair<std::uint32_t, std::string>> select_features(
    std::span<const IGScore> scores, const SelectionCriterion& criterion) {
  if (!criterion.ig_threshold && !criterion.k) {
    fail(ErrorKind::InvalidArgument, "selection criterion is empty");
  }
  std::vector<IGScore> ordered(scores.begin(), scores.end());
  std::sort(ordered.begin(), ordered.end(), [](const IGScore& a, const IGScore& b) {
    if (a.ig != b.ig) return a.ig > b.ig;
    return a.key < b.key;
  });

  std::vector<std::pair<std::uint32_t, std::string>> kept;
  for (const IGScore& s : ordered) {
    if (criterion.ig_threshold && !(s.ig > *criterion.ig_threshold)) break;
    if (criterion.k && kept.size() >= *criterion.k) break;
    kept.emplace_back(s.feature_id, s.key);
  }
  return kept;
}

}  // namespace opgram
