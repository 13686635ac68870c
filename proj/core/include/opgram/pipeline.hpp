#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "opgram/classify.hpp"
#include "opgram/corpus.hpp"
#include "opgram/feature_select.hpp"

namespace opgram {

/// One configuration drives every stage. Stages communicate only through
/// files under `out_dir`, so runs are resumable and reproducible.
struct PipelineConfig {
  std::filesystem::path manifest;
  std::filesystem::path out_dir;
  std::size_t n_min = 3;
  std::size_t n_max = 3;
  std::vector<Mode> modes = {Mode::Binary};
  Task task = Task::Detect;
  std::optional<double> ig_threshold;  // defaults to 0.1 when top_k unset
  std::optional<std::size_t> top_k;
  std::uint64_t segment_budget_bytes = 1ull << 30;
  Algorithm algorithm = Algorithm::LinearSvm;
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  SmaliMode smali_mode = SmaliMode::Lenient;
  std::optional<std::filesystem::path> opcode_overrides;
  // classifier knobs
  std::size_t epochs = 50;
  double lambda = 0.01;
  double alpha = 1.0;

  void validate() const;
};

/// Stage artifact paths for one (task, n, mode) cell, all within out_dir.
struct StagePaths {
  std::filesystem::path vocabulary;  // {task}_n{n}_vocabulary.tsv
  std::filesystem::path instances;   // {task}_n{n}_{mode}_instances.txt
  std::filesystem::path ranking;     // {task}_n{n}_{mode}_ranking.tsv
  std::filesystem::path selection;   // {task}_n{n}_{mode}_selected.tsv
  std::filesystem::path report;      // {task}_n{n}_{mode}_{algo}_report.json
  std::filesystem::path arff;        // {task}_n{n}_{mode}_instances.arff
  std::filesystem::path detail;      // {task}_n{n}_{mode}_extension_detail.tsv
};
StagePaths stage_paths(const PipelineConfig& config, std::size_t n, Mode mode);

void run_extract(const PipelineConfig& config);
void run_select(const PipelineConfig& config);
void run_eval(const PipelineConfig& config);
void run_analyze(const PipelineConfig& config);
void run_export_arff(const PipelineConfig& config);

}  // namespace opgram
