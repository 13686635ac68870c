#include "opgram/ngram.hpp"

#include <algorithm>
#include <unordered_set>

#include "parallel.hpp"

namespace opgram {

namespace {

// Raw-byte window keys are half the size of hex keys and sort identically
// (both orders are lexicographic and hex rendering is monotone per byte).
void collect_raw_keys(const AppRecord& app, std::size_t n,
                      std::unordered_set<std::string>& out) {
  for (const MethodSequence& m : app.methods) {
    if (m.size() < n) continue;
    for (std::size_t i = 0; i + n <= m.size(); ++i) {
      out.emplace(reinterpret_cast<const char*>(m.data()) + i, n);
    }
  }
}

void count_raw_keys(const AppRecord& app, std::size_t n,
                    std::unordered_map<std::string, std::uint64_t>& out) {
  for (const MethodSequence& m : app.methods) {
    if (m.size() < n) continue;
    for (std::size_t i = 0; i + n <= m.size(); ++i) {
      ++out[std::string(reinterpret_cast<const char*>(m.data()) + i, n)];
    }
  }
}

bool app_in_task(const AppRecord& app, Task task) {
  return task == Task::Detect || app.label == Label::Malware;
}

}  // namespace

std::string_view to_string(Mode mode) noexcept {
  return mode == Mode::Binary ? "binary" : "frequency";
}

Mode mode_from_string(std::string_view s) {
  if (s == "binary") return Mode::Binary;
  if (s == "frequency") return Mode::Frequency;
  fail(ErrorKind::FormatError, "unknown mode '" + std::string(s) + "' (expected binary|frequency)");
}

std::string_view to_string(Task task) noexcept {
  return task == Task::Detect ? "detect" : "categorize";
}

Task task_from_string(std::string_view s) {
  if (s == "detect") return Task::Detect;
  if (s == "categorize") return Task::Categorize;
  fail(ErrorKind::FormatError, "unknown task '" + std::string(s) + "' (expected detect|categorize)");
}

NGramVocabulary::NGramVocabulary(std::size_t n, std::vector<std::string> sorted_keys)
    : n_(n), keys_(std::move(sorted_keys)) {
  if (n_ == 0) fail(ErrorKind::InvalidArgument, "vocabulary requires n >= 1");
  index_.reserve(keys_.size());
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    const std::string& key = keys_[i];
    if (key.size() != 2 * n_) {
      fail(ErrorKind::LengthMismatch,
           "key '" + key + "' has length " + std::to_string(key.size()) +
               ", expected " + std::to_string(2 * n_));
    }
    if (i > 0 && !(keys_[i - 1] < key)) {
      fail(ErrorKind::FormatError, "vocabulary keys not strictly sorted at '" + key + "'");
    }
    index_.emplace(key, static_cast<std::uint32_t>(i));
  }
}

std::optional<std::uint32_t> NGramVocabulary::id_of(std::string_view key) const noexcept {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& NGramVocabulary::key_of(std::uint32_t id) const {
  if (id >= keys_.size()) {
    fail(ErrorKind::DimensionMismatch,
         "feature id " + std::to_string(id) + " out of range (vocabulary size " +
             std::to_string(keys_.size()) + ")");
  }
  return keys_[id];
}

SparseVector binarize(const SparseVector& v) {
  SparseVector out;
  out.mode = Mode::Binary;
  out.entries.reserve(v.entries.size());
  for (const auto& [id, value] : v.entries) {
    if (value >= 1) out.entries.emplace_back(id, 1);
  }
  return out;
}

std::vector<std::string> extract_ngrams(const MethodSequence& method, std::size_t n) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "n-gram length must be >= 1");
  std::vector<std::string> keys;
  if (method.size() < n) return keys;
  keys.reserve(method.size() - n + 1);
  for (std::size_t i = 0; i + n <= method.size(); ++i) {
    keys.push_back(ngram_key(std::span<const OpcodeByte>(method.data() + i, n)));
  }
  return keys;
}

NGramVocabulary build_vocabulary(std::span<const AppRecord> corpus, std::size_t n,
                                 Task task, unsigned threads) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "n-gram length must be >= 1");

  std::vector<std::unordered_set<std::string>> per_app(corpus.size());
  detail::parallel_for(corpus.size(), threads, [&](std::size_t i) {
    if (app_in_task(corpus[i], task)) collect_raw_keys(corpus[i], n, per_app[i]);
  });

  std::unordered_set<std::string> merged;
  for (auto& s : per_app) {
    merged.merge(s);
  }

  std::vector<std::string> keys;
  keys.reserve(merged.size());
  for (const std::string& raw : merged) {
    keys.push_back(ngram_key(std::span<const OpcodeByte>(
        reinterpret_cast<const OpcodeByte*>(raw.data()), raw.size())));
  }
  std::sort(keys.begin(), keys.end());
  return NGramVocabulary(n, std::move(keys));
}

SparseVector app_vector(const AppRecord& app, const NGramVocabulary& vocab, Mode mode) {
  std::unordered_map<std::string, std::uint64_t> counts;
  count_raw_keys(app, vocab.n(), counts);

  SparseVector vec;
  vec.mode = mode;
  vec.entries.reserve(counts.size());
  std::string hex;
  for (const auto& [raw, count] : counts) {
    hex = ngram_key(std::span<const OpcodeByte>(
        reinterpret_cast<const OpcodeByte*>(raw.data()), raw.size()));
    if (auto id = vocab.id_of(hex)) {
      vec.entries.emplace_back(*id, mode == Mode::Binary ? 1 : count);
    }
  }
  std::sort(vec.entries.begin(), vec.entries.end());
  return vec;
}

std::vector<LabeledInstance> vectorize_corpus(std::span<const AppRecord> corpus,
                                              const NGramVocabulary& vocab, Mode mode,
                                              Task task, unsigned threads) {
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const AppRecord& app = corpus[i];
    if (!app_in_task(app, task)) continue;
    if (task == Task::Categorize && !app.family) {
      fail(ErrorKind::MissingFamily, "malware app '" + app.id + "' has no family label");
    }
    selected.push_back(i);
  }

  std::vector<LabeledInstance> instances(selected.size());
  detail::parallel_for(selected.size(), threads, [&](std::size_t j) {
    const AppRecord& app = corpus[selected[j]];
    LabeledInstance inst;
    inst.app_id = app.id;
    inst.label = task == Task::Detect ? std::string(to_string(app.label)) : *app.family;
    inst.vector = app_vector(app, vocab, mode);
    instances[j] = std::move(inst);
  });
  return instances;
}

}  // namespace opgram
