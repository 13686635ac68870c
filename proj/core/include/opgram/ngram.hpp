#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "opgram/corpus.hpp"

namespace opgram {

/// Feature value semantics: presence (0/1) or total occurrence count.
enum class Mode { Binary, Frequency };

/// Detection classifies benign vs malware over all apps; categorization
/// classifies malware apps into families.
enum class Task { Detect, Categorize };

std::string_view to_string(Mode mode) noexcept;
Mode mode_from_string(std::string_view s);
std::string_view to_string(Task task) noexcept;
Task task_from_string(std::string_view s);

/// Bijection between n-gram hex keys and dense 0-based feature ids for a
/// fixed n. Ids follow strict lexicographic key order, so the mapping is
/// independent of extraction order.
class NGramVocabulary {
 public:
  NGramVocabulary() = default;
  NGramVocabulary(std::size_t n, std::vector<std::string> sorted_keys);

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return keys_.size(); }
  bool empty() const noexcept { return keys_.empty(); }
  const std::vector<std::string>& keys() const noexcept { return keys_; }

  std::optional<std::uint32_t> id_of(std::string_view key) const noexcept;
  const std::string& key_of(std::uint32_t id) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> index_;
};

/// (feature id, value) pairs with strictly ascending ids. Binary vectors
/// hold only 1s; frequency vectors hold counts >= 1.
struct SparseVector {
  Mode mode = Mode::Binary;
  std::vector<std::pair<std::uint32_t, std::uint64_t>> entries;
};

SparseVector binarize(const SparseVector& v);

struct LabeledInstance {
  std::string app_id;
  std::string label;  // benign/malware for detection, family name for categorization
  SparseVector vector;
};

/// All length-n windows of one method, in order: L-n+1 keys when L >= n,
/// none otherwise.
std::vector<std::string> extract_ngrams(const MethodSequence& method, std::size_t n);

/// Sorted union of every method's n-grams over the apps selected by `task`
/// (all apps for detection, malware only for categorization).
NGramVocabulary build_vocabulary(std::span<const AppRecord> corpus, std::size_t n,
                                 Task task = Task::Detect, unsigned threads = 1);

/// One sparse vector for one app. Keys missing from the vocabulary are
/// dropped, which makes train-vocabulary/test-app splits safe.
SparseVector app_vector(const AppRecord& app, const NGramVocabulary& vocab, Mode mode);

/// One labeled instance per app in corpus order. Categorization skips benign
/// apps and requires a family on every malware app.
std::vector<LabeledInstance> vectorize_corpus(std::span<const AppRecord> corpus,
                                              const NGramVocabulary& vocab, Mode mode,
                                              Task task = Task::Detect, unsigned threads = 1);

}  // namespace opgram
