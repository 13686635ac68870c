#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>

#include "opgram/classify.hpp"
#include "opgram/evaluate.hpp"
#include "opgram/feature_select.hpp"
#include "opgram/ngram.hpp"
#include "opgram/structure.hpp"

namespace opgram::io {

/// Vocabulary file: `feature_id<TAB>ngram_key`, ascending id.
void write_vocabulary(std::ostream& out, const NGramVocabulary& vocab, Task task);
NGramVocabulary read_vocabulary(std::istream& in);

/// Sparse instance file, one line per app: `<label> <id>:<value> ...` with
/// ascending ids (libsvm-style), preceded by a self-describing header.
void write_instances(std::ostream& out, std::span<const LabeledInstance> instances,
                     std::size_t n, Mode mode, Task task);

struct InstanceData {
  std::size_t n = 0;
  Mode mode = Mode::Binary;
  Task task = Task::Detect;
  std::vector<LabeledInstance> instances;
};
InstanceData read_instances(std::istream& in);

/// Ranking file: `rank<TAB>ngram_key<TAB>ig`, rank ascending from 1.
void write_ranking(std::ostream& out, std::span<const IGScore> scores, std::size_t n,
                   Mode mode, Task task);

/// Selection file: `feature_id<TAB>ngram_key` of the surviving features, in
/// ranking order. `criterion` is recorded in the header.
void write_selection(std::ostream& out,
                     std::span<const std::pair<std::uint32_t, std::string>> selection,
                     std::size_t n, Mode mode, Task task, const std::string& criterion);

struct SelectionData {
  std::size_t n = 0;
  Mode mode = Mode::Binary;
  Task task = Task::Detect;
  std::vector<std::pair<std::uint32_t, std::string>> features;
};
SelectionData read_selection(std::istream& in);

/// Extension analysis tables: `n<TAB>new<TAB>prefix<TAB>suffix<TAB>overlap<TAB>total`.
/// The proportions variant omits levels with zero selected grams.
void write_extension_counts(std::ostream& out, const ExtensionReport& report, Mode mode,
                            Task task);
void write_extension_proportions(std::ostream& out, const ExtensionReport& report, Mode mode,
                                 Task task);
/// Per-gram detail: `n<TAB>ngram_key<TAB>class<TAB>provenance`.
void write_extension_detail(std::ostream& out, const ExtensionReport::Row& row, Mode mode,
                            Task task,
                            const std::map<std::string, std::string>& provenance);

/// Sparse ARFF export: numeric attribute per feature in id order, nominal
/// class attribute last, `{idx value, ...}` data rows.
void export_arff(std::ostream& out, std::span<const LabeledInstance> instances,
                 const NGramVocabulary& vocab, Mode mode, Task task);

/// Cross-validation report as JSON.
void write_report(std::ostream& out, const CVReport& report, std::size_t n, Mode mode,
                  Task task, Algorithm algorithm, std::size_t folds, std::uint64_t seed);

/// Appends one `n mode algorithm task weighted_f` row, creating the file
/// (with header) on first use.
void append_result_row(const std::filesystem::path& path, std::size_t n, Mode mode,
                       Algorithm algorithm, Task task, double weighted_f);

/// FNV-1a over n and the key list; binds models to their feature space.
std::uint64_t feature_space_hash(std::size_t n, std::span<const std::string> keys);
std::uint64_t vocabulary_hash(const NGramVocabulary& vocab);

/// Versioned JSON model containers. Loading verifies the feature-space hash
/// and throws HashMismatch when the model was built over different features.
void save_model(std::ostream& out, const NBModel& model, std::uint64_t vocab_hash);
void save_model(std::ostream& out, const LinearModel& model, std::uint64_t vocab_hash);
NBModel load_nb_model(std::istream& in, std::uint64_t expected_vocab_hash);
LinearModel load_linear_model(std::istream& in, std::uint64_t expected_vocab_hash);

}  // namespace opgram::io
