// opgram: n-gram opcode feature pipeline for Android app classification.
//
// Subcommands mirror the pipeline stages; all of them exchange data through
// files in --out, so any stage can be rerun or resumed independently:
//   extract      manifest -> vocabulary + sparse instance files
//   select       instances -> information-gain ranking + selected features
//   eval         selected features -> cross-validated classifier report
//   analyze      selected features across n -> new/extended structure tables
//   export-arff  instances -> sparse ARFF

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "opgram/log.hpp"
#include "opgram/pipeline.hpp"
#include "opgram/version.hpp"

namespace {

struct CliOptions {
  opgram::PipelineConfig config;
  std::string mode = "binary";
  std::string task = "detect";
  std::string algo = "svm";
  std::string smali = "lenient";
  std::string n_range;
  std::size_t n = 3;
  double ig_threshold = 0.1;
  bool ig_threshold_set = false;
  std::size_t top_k = 0;
  bool top_k_set = false;
  std::string opcode_overrides;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--n", opt.n, "n-gram length")->check(CLI::PositiveNumber);
  cmd->add_option("--n-range", opt.n_range, "inclusive n range, e.g. 1..3")
      ->excludes(cmd->get_option("--n"));
  cmd->add_option("--mode", opt.mode, "binary|frequency|both")
      ->check(CLI::IsMember({"binary", "frequency", "both"}));
  cmd->add_option("--task", opt.task, "detect|categorize")
      ->check(CLI::IsMember({"detect", "categorize"}));
  cmd->add_option("--seed", opt.config.seed, "master RNG seed");
  cmd->add_option("--threads", opt.config.threads, "worker thread cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", opt.config.out_dir, "output directory")->required();
}

void finish_config(CliOptions& opt) {
  using namespace opgram;
  if (!opt.n_range.empty()) {
    auto sep = opt.n_range.find("..");
    if (sep == std::string::npos) {
      fail(ErrorKind::InvalidArgument, "--n-range expects A..B, got '" + opt.n_range + "'");
    }
    try {
      opt.config.n_min = std::stoull(opt.n_range.substr(0, sep));
      opt.config.n_max = std::stoull(opt.n_range.substr(sep + 2));
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidArgument, "--n-range expects A..B, got '" + opt.n_range + "'");
    }
  } else {
    opt.config.n_min = opt.config.n_max = opt.n;
  }

  if (opt.mode == "both") {
    opt.config.modes = {Mode::Binary, Mode::Frequency};
  } else {
    opt.config.modes = {mode_from_string(opt.mode)};
  }
  opt.config.task = task_from_string(opt.task);
  opt.config.algorithm = algorithm_from_string(opt.algo);
  opt.config.smali_mode = opt.smali == "strict" ? SmaliMode::Strict : SmaliMode::Lenient;
  if (opt.ig_threshold_set && opt.top_k_set) {
    fail(ErrorKind::InvalidArgument, "--ig-threshold and --top-k are mutually exclusive");
  }
  if (opt.top_k_set) {
    opt.config.top_k = opt.top_k;
  } else {
    opt.config.ig_threshold = opt.ig_threshold;
  }
  if (!opt.opcode_overrides.empty()) opt.config.opcode_overrides = opt.opcode_overrides;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"n-gram opcode extraction, selection, classification and structure analysis"};
  app.set_version_flag("--version", std::string(opgram::kVersion));
  app.require_subcommand(1);

  CliOptions opt;

  CLI::App* extract = app.add_subcommand("extract", "build vocabulary and instance files");
  extract->add_option("--manifest", opt.config.manifest, "JSONL dataset manifest")->required();
  extract->add_option("--smali-mode", opt.smali, "lenient|strict unknown-mnemonic handling")
      ->check(CLI::IsMember({"lenient", "strict"}));
  extract->add_option("--opcode-overrides", opt.opcode_overrides,
                      "TSV hex<TAB>mnemonic opcode table overrides");
  add_common_flags(extract, opt);

  CLI::App* select = app.add_subcommand("select", "rank features by information gain");
  select->add_option("--ig-threshold", opt.ig_threshold, "keep features with IG > threshold")
      ->check(CLI::NonNegativeNumber)
      ->each([&](const std::string&) { opt.ig_threshold_set = true; });
  select->add_option("--top-k", opt.top_k, "keep the k best features")
      ->each([&](const std::string&) { opt.top_k_set = true; });
  select->add_option("--segment-budget-bytes", opt.config.segment_budget_bytes,
                     "memory budget for one scoring segment");
  add_common_flags(select, opt);

  CLI::App* eval = app.add_subcommand("eval", "cross-validate a classifier on selected features");
  eval->add_option("--algo", opt.algo, "nb|svm")->check(CLI::IsMember({"nb", "svm"}));
  eval->add_option("--folds", opt.config.folds, "cross-validation folds")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
  eval->add_option("--epochs", opt.config.epochs, "SVM training epochs")
      ->check(CLI::PositiveNumber);
  eval->add_option("--lambda", opt.config.lambda, "SVM regularization strength");
  eval->add_option("--alpha", opt.config.alpha, "naive Bayes smoothing");
  add_common_flags(eval, opt);

  CLI::App* analyze = app.add_subcommand("analyze", "classify selected n-grams as new/extended");
  add_common_flags(analyze, opt);

  CLI::App* arff = app.add_subcommand("export-arff", "export instances as sparse ARFF");
  add_common_flags(arff, opt);

  CLI11_PARSE(app, argc, argv);

  try {
    finish_config(opt);
    if (extract->parsed()) opgram::run_extract(opt.config);
    if (select->parsed()) opgram::run_select(opt.config);
    if (eval->parsed()) opgram::run_eval(opt.config);
    if (analyze->parsed()) opgram::run_analyze(opt.config);
    if (arff->parsed()) opgram::run_export_arff(opt.config);
  } catch (const opgram::Error& e) {
    std::fprintf(stderr, "opgram: error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "opgram: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
