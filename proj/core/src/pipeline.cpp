#include "opgram/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "opgram/formats.hpp"
#include "opgram/evaluate.hpp"
#include "opgram/log.hpp"
#include "opgram/structure.hpp"

namespace opgram {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot read '" + path.string() + "'");
  return in;
}

std::string cell_name(const PipelineConfig& config, std::size_t n) {
  return std::string(to_string(config.task)) + "_n" + std::to_string(n);
}

std::vector<AppRecord> load_pipeline_corpus(const PipelineConfig& config) {
  OpcodeTable table = OpcodeTable::dalvik();
  if (config.opcode_overrides) {
    auto in = open_in(*config.opcode_overrides);
    table.apply_overrides(in);
  }
  DatasetManifest manifest = DatasetManifest::load(config.manifest);
  LoadOptions options;
  options.smali_mode = config.smali_mode;
  options.threads = config.threads;
  auto corpus = load_corpus(manifest, table, options);
  log_info("loaded " + std::to_string(corpus.size()) + " apps from " + config.manifest.string());
  return corpus;
}

SelectionCriterion criterion_of(const PipelineConfig& config) {
  if (config.top_k) return SelectionCriterion::top_k(*config.top_k);
  return SelectionCriterion::threshold(config.ig_threshold.value_or(0.1));
}

std::string criterion_text(const PipelineConfig& config) {
  if (config.top_k) return "top_k=" + std::to_string(*config.top_k);
  std::ostringstream ss;
  ss << "ig>" << config.ig_threshold.value_or(0.1);
  return ss.str();
}

// Remaps instances onto the selected features; new ids follow selection
// (ranking) order.
std::vector<LabeledInstance> project_instances(
    const std::vector<LabeledInstance>& instances,
    const std::vector<std::pair<std::uint32_t, std::string>>& selection) {
  std::unordered_map<std::uint32_t, std::uint32_t> remap;
  remap.reserve(selection.size());
  for (std::uint32_t i = 0; i < selection.size(); ++i) remap.emplace(selection[i].first, i);

  std::vector<LabeledInstance> projected;
  projected.reserve(instances.size());
  for (const auto& inst : instances) {
    LabeledInstance p;
    p.app_id = inst.app_id;
    p.label = inst.label;
    p.vector.mode = inst.vector.mode;
    for (const auto& [id, value] : inst.vector.entries) {
      auto it = remap.find(id);
      if (it != remap.end()) p.vector.entries.emplace_back(it->second, value);
    }
    std::sort(p.vector.entries.begin(), p.vector.entries.end());
    projected.push_back(std::move(p));
  }
  return projected;
}

Trainer make_trainer(const PipelineConfig& config, Mode mode, std::size_t feature_count) {
  if (config.algorithm == Algorithm::NaiveBayes) {
    double alpha = config.alpha;
    return [mode, feature_count, alpha](const std::vector<LabeledInstance>& train) {
      NBModel model = train_nb(train, mode, feature_count, alpha);
      return Predictor([model = std::move(model)](const SparseVector& v) {
        return predict_nb(model, v).label;
      });
    };
  }
  TrainConfig tc;
  tc.algorithm = Algorithm::LinearSvm;
  tc.seed = config.seed;
  tc.epochs = config.epochs;
  tc.lambda = config.lambda;
  tc.threads = config.threads;
  return [tc, feature_count](const std::vector<LabeledInstance>& train) {
    LinearModel model = train_linear(train, feature_count, tc);
    return Predictor([model = std::move(model)](const SparseVector& v) {
      return predict_linear(model, v);
    });
  };
}

// Which labels contain each selected feature; the extra provenance column of
// the detection-task detail files.
std::map<std::string, std::string> provenance_of(
    const std::vector<LabeledInstance>& instances,
    const std::vector<std::pair<std::uint32_t, std::string>>& selection) {
  std::unordered_map<std::uint32_t, std::pair<bool, bool>> seen;  // benign, malware
  seen.reserve(selection.size());
  for (const auto& [id, key] : selection) seen.emplace(id, std::make_pair(false, false));

  for (const auto& inst : instances) {
    const bool malware = inst.label == "malware";
    for (const auto& [id, value] : inst.vector.entries) {
      auto it = seen.find(id);
      if (it == seen.end() || value < 1) continue;
      (malware ? it->second.second : it->second.first) = true;
    }
  }

  std::map<std::string, std::string> out;
  for (const auto& [id, key] : selection) {
    const auto [benign, malware] = seen.at(id);
    if (benign && malware) {
      out[key] = "shared";
    } else if (benign) {
      out[key] = "benign-only";
    } else if (malware) {
      out[key] = "malware-only";
    } else {
      out[key] = "unseen";
    }
  }
  return out;
}

}  // namespace

void PipelineConfig::validate() const {
  if (n_min < 1 || n_max < n_min) fail(ErrorKind::InvalidArgument, "need 1 <= n_min <= n_max");
  if (folds < 2) fail(ErrorKind::InvalidArgument, "fold count must be >= 2");
  if (ig_threshold && *ig_threshold < 0) fail(ErrorKind::InvalidArgument, "IG threshold must be >= 0");
  if (modes.empty()) fail(ErrorKind::InvalidArgument, "at least one mode required");
  if (out_dir.empty()) fail(ErrorKind::InvalidArgument, "output directory required");
}

StagePaths stage_paths(const PipelineConfig& config, std::size_t n, Mode mode) {
  const std::string cell = cell_name(config, n);
  const std::string m = std::string(to_string(mode));
  StagePaths p;
  p.vocabulary = config.out_dir / (cell + "_vocabulary.tsv");
  p.instances = config.out_dir / (cell + "_" + m + "_instances.txt");
  p.ranking = config.out_dir / (cell + "_" + m + "_ranking.tsv");
  p.selection = config.out_dir / (cell + "_" + m + "_selected.tsv");
  p.report = config.out_dir / (cell + "_" + m + "_" +
                               std::string(to_string(config.algorithm)) + "_report.json");
  p.arff = config.out_dir / (cell + "_" + m + "_instances.arff");
  p.detail = config.out_dir / (cell + "_" + m + "_extension_detail.tsv");
  return p;
}

void run_extract(const PipelineConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);
  auto corpus = load_pipeline_corpus(config);

  for (std::size_t n = config.n_min; n <= config.n_max; ++n) {
    NGramVocabulary vocab = build_vocabulary(corpus, n, config.task, config.threads);
    {
      auto out = open_out(stage_paths(config, n, config.modes.front()).vocabulary);
      io::write_vocabulary(out, vocab, config.task);
    }
    log_info(cell_name(config, n) + ": " + std::to_string(vocab.size()) + " unique n-grams");

    // Count once in frequency mode; binary vectors are its binarization.
    auto frequency = vectorize_corpus(corpus, vocab, Mode::Frequency, config.task, config.threads);
    for (Mode mode : config.modes) {
      StagePaths paths = stage_paths(config, n, mode);
      auto out = open_out(paths.instances);
      if (mode == Mode::Frequency) {
        io::write_instances(out, frequency, n, mode, config.task);
      } else {
        std::vector<LabeledInstance> binary = frequency;
        for (auto& inst : binary) inst.vector = binarize(inst.vector);
        io::write_instances(out, binary, n, mode, config.task);
      }
    }
  }
}

void run_select(const PipelineConfig& config) {
  config.validate();
  for (std::size_t n = config.n_min; n <= config.n_max; ++n) {
    NGramVocabulary vocab;
    {
      auto in = open_in(stage_paths(config, n, config.modes.front()).vocabulary);
      vocab = io::read_vocabulary(in);
    }
    for (Mode mode : config.modes) {
      StagePaths paths = stage_paths(config, n, mode);
      io::InstanceData data;
      {
        auto in = open_in(paths.instances);
        data = io::read_instances(in);
      }

      std::set<std::string> labels;
      for (const auto& inst : data.instances) labels.insert(inst.label);
      SegmentPlan plan = SegmentPlan::for_budget(static_cast<std::uint32_t>(vocab.size()),
                                                 labels.size(), config.segment_budget_bytes);
      auto scores = segmented_ig(data.instances, vocab, plan, mode, config.threads);
      {
        auto out = open_out(paths.ranking);
        io::write_ranking(out, scores, n, mode, config.task);
      }
      auto selection = select_features(scores, criterion_of(config));
      {
        auto out = open_out(paths.selection);
        io::write_selection(out, selection, n, mode, config.task, criterion_text(config));
      }
      log_info(cell_name(config, n) + " " + std::string(to_string(mode)) + ": selected " +
               std::to_string(selection.size()) + " of " + std::to_string(vocab.size()));
    }
  }
}

void run_eval(const PipelineConfig& config) {
  config.validate();
  for (std::size_t n = config.n_min; n <= config.n_max; ++n) {
    for (Mode mode : config.modes) {
      StagePaths paths = stage_paths(config, n, mode);
      io::InstanceData data;
      {
        auto in = open_in(paths.instances);
        data = io::read_instances(in);
      }
      io::SelectionData selection;
      {
        auto in = open_in(paths.selection);
        selection = io::read_selection(in);
      }

      auto projected = project_instances(data.instances, selection.features);
      Trainer trainer = make_trainer(config, mode, selection.features.size());
      CVReport report = cross_validate(projected, config.folds, config.seed, trainer);
      {
        auto out = open_out(paths.report);
        io::write_report(out, report, n, mode, config.task, config.algorithm, config.folds,
                         config.seed);
      }
      io::append_result_row(config.out_dir / "results.tsv", n, mode, config.algorithm,
                            config.task, report.weighted_f);
      std::ostringstream ss;
      ss << cell_name(config, n) << ' ' << to_string(mode) << ' ' << to_string(config.algorithm)
         << ": weighted_f=" << report.weighted_f;
      log_info(ss.str());
    }
  }
}

void run_analyze(const PipelineConfig& config) {
  config.validate();
  if (config.n_max == config.n_min) {
    fail(ErrorKind::MissingLevel, "extension analysis needs an n range of at least two levels");
  }

  for (Mode mode : config.modes) {
    std::map<std::size_t, std::vector<std::string>> selected_by_n;
    std::map<std::size_t, io::SelectionData> selections;
    for (std::size_t n = config.n_min; n <= config.n_max; ++n) {
      auto in = open_in(stage_paths(config, n, mode).selection);
      io::SelectionData data = io::read_selection(in);
      std::vector<std::string> keys;
      keys.reserve(data.features.size());
      for (const auto& [id, key] : data.features) keys.push_back(key);
      selected_by_n.emplace(n, std::move(keys));
      selections.emplace(n, std::move(data));
    }

    ExtensionReport report = extension_report(selected_by_n);
    const std::string m = std::string(to_string(mode));
    const std::string prefix = std::string(to_string(config.task)) + "_" + m;
    {
      auto out = open_out(config.out_dir / (prefix + "_extension_counts.tsv"));
      io::write_extension_counts(out, report, mode, config.task);
    }
    {
      auto out = open_out(config.out_dir / (prefix + "_extension_proportions.tsv"));
      io::write_extension_proportions(out, report, mode, config.task);
    }

    for (const auto& row : report.rows) {
      std::map<std::string, std::string> provenance;
      if (config.task == Task::Detect) {
        auto in = open_in(stage_paths(config, row.n, mode).instances);
        io::InstanceData data = io::read_instances(in);
        provenance = provenance_of(data.instances, selections.at(row.n).features);
      }
      auto out = open_out(stage_paths(config, row.n, mode).detail);
      io::write_extension_detail(out, row, mode, config.task, provenance);
    }
  }
}

void run_export_arff(const PipelineConfig& config) {
  config.validate();
  for (std::size_t n = config.n_min; n <= config.n_max; ++n) {
    NGramVocabulary vocab;
    {
      auto in = open_in(stage_paths(config, n, config.modes.front()).vocabulary);
      vocab = io::read_vocabulary(in);
    }
    for (Mode mode : config.modes) {
      StagePaths paths = stage_paths(config, n, mode);
      io::InstanceData data;
      {
        auto in = open_in(paths.instances);
        data = io::read_instances(in);
      }
      auto out = open_out(paths.arff);
      io::export_arff(out, data.instances, vocab, mode, config.task);
    }
  }
}

}  // namespace opgram
