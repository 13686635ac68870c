#include "opgram/formats.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "opgram/version.hpp"

namespace opgram::io {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_header(std::ostream& out, std::string_view kind,
                  const std::vector<std::pair<std::string, std::string>>& fields) {
  out << "# opgram " << kind << " v" << kVersion << '\n';
  if (fields.empty()) return;
  out << '#';
  for (const auto& [key, value] : fields) out << ' ' << key << '=' << value;
  out << '\n';
}

struct Header {
  std::string kind;
  std::map<std::string, std::string> fields;

  const std::string& get(const std::string& key) const {
    auto it = fields.find(key);
    if (it == fields.end()) fail(ErrorKind::FormatError, "header field '" + key + "' missing");
    return it->second;
  }
};

// Consumes leading `#` comment lines; returns parsed kind and k=v fields
// plus the remaining data lines.
Header read_header(std::istream& in, std::string_view expected_kind, std::string& pending_line) {
  Header header;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] != '#') {
      pending_line = line;
      break;
    }
    std::istringstream ss(line.substr(1));
    std::string token;
    while (ss >> token) {
      auto eq = token.find('=');
      if (eq != std::string::npos) {
        header.fields[token.substr(0, eq)] = token.substr(eq + 1);
      } else if (token == "opgram") {
        if (ss >> token) header.kind = token;
      }
    }
  }
  if (header.kind != expected_kind) {
    fail(ErrorKind::FormatError,
         "expected an opgram " + std::string(expected_kind) + " file, found '" + header.kind + "'");
  }
  return header;
}

std::size_t parse_size(const std::string& s, const std::string& what) {
  try {
    return static_cast<std::size_t>(std::stoull(s));
  } catch (const std::exception&) {
    fail(ErrorKind::FormatError, "bad " + what + " value '" + s + "'");
  }
}

std::string arff_quote(const std::string& s) {
  if (s.find_first_of(" ,'\"{}%") == std::string::npos && !s.empty()) return s;
  std::string quoted = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') quoted += '\\';
    quoted += c;
  }
  quoted += '\'';
  return quoted;
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv_mix(std::uint64_t& h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json parse_model_json(std::istream& in, std::uint64_t expected_vocab_hash,
                                std::string_view expected_algorithm) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::FormatError, std::string("bad model file: ") + e.what());
  }
  if (j.value("format", "") != "opgram-model" || j.value("version", 0) != 1) {
    fail(ErrorKind::FormatError, "not an opgram model container");
  }
  if (j.value("algorithm", "") != expected_algorithm) {
    fail(ErrorKind::FormatError, "model algorithm is '" + j.value("algorithm", std::string()) +
                                     "', expected '" + std::string(expected_algorithm) + "'");
  }
  if (j.value("vocab_hash", "") != hash_hex(expected_vocab_hash)) {
    fail(ErrorKind::HashMismatch, "model was trained over a different feature space");
  }
  return j;
}

}  // namespace

void write_vocabulary(std::ostream& out, const NGramVocabulary& vocab, Task task) {
  write_header(out, "vocabulary",
               {{"n", std::to_string(vocab.n())}, {"task", std::string(to_string(task))}});
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << i << '\t' << vocab.keys()[i] << '\n';
  }
}

NGramVocabulary read_vocabulary(std::istream& in) {
  std::string pending;
  Header header = read_header(in, "vocabulary", pending);
  const std::size_t n = parse_size(header.get("n"), "n");

  std::vector<std::string> keys;
  std::string line = pending;
  bool have_line = !pending.empty();
  while (have_line || std::getline(in, line)) {
    have_line = false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) fail(ErrorKind::FormatError, "vocabulary row without a tab");
    std::size_t id = parse_size(line.substr(0, tab), "feature id");
    if (id != keys.size()) {
      fail(ErrorKind::FormatError, "vocabulary ids not dense/ascending at id " + std::to_string(id));
    }
    keys.push_back(line.substr(tab + 1));
  }
  return NGramVocabulary(n, std::move(keys));
}

void write_instances(std::ostream& out, std::span<const LabeledInstance> instances,
                     std::size_t n, Mode mode, Task task) {
  write_header(out, "instances",
               {{"n", std::to_string(n)},
                {"mode", std::string(to_string(mode))},
                {"task", std::string(to_string(task))}});
  for (const auto& inst : instances) {
    out << inst.label;
    for (const auto& [id, value] : inst.vector.entries) {
      out << ' ' << id << ':' << value;
    }
    out << '\n';
  }
}

InstanceData read_instances(std::istream& in) {
  std::string pending;
  Header header = read_header(in, "instances", pending);

  InstanceData data;
  data.n = parse_size(header.get("n"), "n");
  data.mode = mode_from_string(header.get("mode"));
  data.task = task_from_string(header.get("task"));

  std::string line = pending;
  bool have_line = !pending.empty();
  std::size_t row = 0;
  while (have_line || std::getline(in, line)) {
    have_line = false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    LabeledInstance inst;
    inst.vector.mode = data.mode;
    std::istringstream ss(line);
    ss >> inst.label;
    inst.app_id = "row" + std::to_string(row);

    std::string token;
    std::int64_t last_id = -1;
    while (ss >> token) {
      auto colon = token.find(':');
      if (colon == std::string::npos) {
        fail(ErrorKind::FormatError, "instance entry '" + token + "' is not id:value");
      }
      std::uint32_t id = static_cast<std::uint32_t>(parse_size(token.substr(0, colon), "feature id"));
      std::uint64_t value = parse_size(token.substr(colon + 1), "feature value");
      if (static_cast<std::int64_t>(id) <= last_id) {
        fail(ErrorKind::FormatError, "instance ids not strictly ascending");
      }
      if (value < 1 || (data.mode == Mode::Binary && value != 1)) {
        fail(ErrorKind::FormatError, "bad value " + std::to_string(value) + " for mode " +
                                         std::string(to_string(data.mode)));
      }
      last_id = id;
      inst.vector.entries.emplace_back(id, value);
    }
    data.instances.push_back(std::move(inst));
    ++row;
  }
  return data;
}

void write_ranking(std::ostream& out, std::span<const IGScore> scores, std::size_t n,
                   Mode mode, Task task) {
  write_header(out, "ranking",
               {{"n", std::to_string(n)},
                {"mode", std::string(to_string(mode))},
                {"task", std::string(to_string(task))}});
  std::size_t rank = 1;
  for (const auto& score : scores) {
    out << rank++ << '\t' << score.key << '\t' << fmt_double(score.ig) << '\n';
  }
}

void write_selection(std::ostream& out,
                     std::span<const std::pair<std::uint32_t, std::string>> selection,
                     std::size_t n, Mode mode, Task task, const std::string& criterion) {
  write_header(out, "selection",
               {{"n", std::to_string(n)},
                {"mode", std::string(to_string(mode))},
                {"task", std::string(to_string(task))},
                {"criterion", criterion}});
  for (const auto& [id, key] : selection) {
    out << id << '\t' << key << '\n';
  }
}

SelectionData read_selection(std::istream& in) {
  std::string pending;
  Header header = read_header(in, "selection", pending);

  SelectionData data;
  data.n = parse_size(header.get("n"), "n");
  data.mode = mode_from_string(header.get("mode"));
  data.task = task_from_string(header.get("task"));

  std::string line = pending;
  bool have_line = !pending.empty();
  while (have_line || std::getline(in, line)) {
    have_line = false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) fail(ErrorKind::FormatError, "selection row without a tab");
    data.features.emplace_back(
        static_cast<std::uint32_t>(parse_size(line.substr(0, tab), "feature id")),
        line.substr(tab + 1));
  }
  return data;
}

void write_extension_counts(std::ostream& out, const ExtensionReport& report, Mode mode,
                            Task task) {
  write_header(out, "extension-counts",
               {{"mode", std::string(to_string(mode))}, {"task", std::string(to_string(task))}});
  out << "n\tnew\tprefix\tsuffix\toverlap\ttotal\n";
  for (const auto& row : report.rows) {
    out << row.n << '\t' << row.new_count << '\t' << row.prefix_count << '\t'
        << row.suffix_count << '\t' << row.overlap_count << '\t' << row.total() << '\n';
  }
}

void write_extension_proportions(std::ostream& out, const ExtensionReport& report, Mode mode,
                                 Task task) {
  write_header(out, "extension-proportions",
               {{"mode", std::string(to_string(mode))}, {"task", std::string(to_string(task))}});
  out << "n\tnew\tprefix\tsuffix\toverlap\n";
  for (const auto& row : report.rows) {
    const std::uint64_t total = row.total();
    if (total == 0) continue;  // proportions undefined for an empty level
    const double t = static_cast<double>(total);
    out << row.n << '\t' << fmt_double(static_cast<double>(row.new_count) / t) << '\t'
        << fmt_double(static_cast<double>(row.prefix_count) / t) << '\t'
        << fmt_double(static_cast<double>(row.suffix_count) / t) << '\t'
        << fmt_double(static_cast<double>(row.overlap_count) / t) << '\n';
  }
}

void write_extension_detail(std::ostream& out, const ExtensionReport::Row& row, Mode mode,
                            Task task,
                            const std::map<std::string, std::string>& provenance) {
  write_header(out, "extension-detail",
               {{"n", std::to_string(row.n)},
                {"mode", std::string(to_string(mode))},
                {"task", std::string(to_string(task))}});
  out << "n\tngram_key\tclass\tprovenance\n";
  for (const auto& [key, cls] : row.grams) {
    auto it = provenance.find(key);
    out << row.n << '\t' << key << '\t' << to_string(cls) << '\t'
        << (it == provenance.end() ? "-" : it->second) << '\n';
  }
}

void export_arff(std::ostream& out, std::span<const LabeledInstance> instances,
                 const NGramVocabulary& vocab, Mode mode, Task task) {
  for (const auto& inst : instances) {
    if (!inst.vector.entries.empty() && inst.vector.entries.back().first >= vocab.size()) {
      fail(ErrorKind::DimensionMismatch,
           "instance '" + inst.app_id + "' does not fit the vocabulary");
    }
  }

  std::set<std::string> labels;
  for (const auto& inst : instances) labels.insert(inst.label);

  out << "% opgram arff v" << kVersion << " n=" << vocab.n() << " mode=" << to_string(mode)
      << " task=" << to_string(task) << '\n';
  out << "@relation " << arff_quote("opgram_" + std::string(to_string(task)) + "_n" +
                                    std::to_string(vocab.n()) + "_" +
                                    std::string(to_string(mode)))
      << '\n';
  for (const auto& key : vocab.keys()) {
    out << "@attribute g_" << key << " numeric\n";
  }
  out << "@attribute class {";
  bool first = true;
  for (const auto& label : labels) {
    if (!first) out << ',';
    out << arff_quote(label);
    first = false;
  }
  out << "}\n@data\n";

  const std::size_t class_index = vocab.size();
  for (const auto& inst : instances) {
    out << '{';
    for (const auto& [id, value] : inst.vector.entries) {
      out << id << ' ' << value << ", ";
    }
    out << class_index << ' ' << arff_quote(inst.label) << "}\n";
  }
}

void write_report(std::ostream& out, const CVReport& report, std::size_t n, Mode mode,
                  Task task, Algorithm algorithm, std::size_t folds, std::uint64_t seed) {
  nlohmann::json j;
  j["tool"] = "opgram";
  j["version"] = std::string(kVersion);
  j["n"] = n;
  j["mode"] = std::string(to_string(mode));
  j["task"] = std::string(to_string(task));
  j["algorithm"] = std::string(to_string(algorithm));
  j["folds"] = folds;
  j["seed"] = seed;
  j["classes"] = report.pooled.classes;

  nlohmann::json pooled;
  pooled["matrix"] = report.pooled.counts;
  pooled["weighted_f"] = report.weighted_f;
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [cls, m] : report.per_class) {
    per_class[cls] = {{"precision", m.precision},
                      {"recall", m.recall},
                      {"f1", m.f1},
                      {"support", m.support}};
  }
  pooled["per_class"] = per_class;
  j["pooled"] = pooled;

  nlohmann::json folds_json = nlohmann::json::array();
  for (std::size_t f = 0; f < report.fold_matrices.size(); ++f) {
    nlohmann::json fold;
    fold["matrix"] = report.fold_matrices[f].counts;
    fold["weighted_f"] = weighted_f_measure(report.fold_matrices[f]);
    fold["train_seconds"] = report.fold_timing[f].train_seconds;
    fold["predict_seconds"] = report.fold_timing[f].predict_seconds;
    folds_json.push_back(fold);
  }
  j["per_fold"] = folds_json;
  j["mean_fold_weighted_f"] = report.mean_fold_weighted_f;
  j["train_seconds"] = report.train_seconds;
  j["predict_seconds"] = report.predict_seconds;

  out << j.dump(2) << '\n';
}

void append_result_row(const std::filesystem::path& path, std::size_t n, Mode mode,
                       Algorithm algorithm, Task task, double weighted_f) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) fail(ErrorKind::IoError, "cannot open results file '" + path.string() + "'");
  if (fresh) {
    write_header(out, "results", {});
    out << "n\tmode\talgorithm\ttask\tweighted_f\n";
  }
  out << n << '\t' << to_string(mode) << '\t' << to_string(algorithm) << '\t' << to_string(task)
      << '\t' << fmt_double(weighted_f) << '\n';
}

std::uint64_t feature_space_hash(std::size_t n, std::span<const std::string> keys) {
  std::uint64_t h = kFnvOffset;
  std::string n_str = std::to_string(n);
  fnv_mix(h, n_str);
  fnv_mix(h, "\n");
  for (const auto& key : keys) {
    fnv_mix(h, key);
    fnv_mix(h, "\n");
  }
  return h;
}

std::uint64_t vocabulary_hash(const NGramVocabulary& vocab) {
  return feature_space_hash(vocab.n(), vocab.keys());
}

void save_model(std::ostream& out, const NBModel& model, std::uint64_t vocab_hash) {
  nlohmann::json j;
  j["format"] = "opgram-model";
  j["version"] = 1;
  j["algorithm"] = "nb";
  j["vocab_hash"] = hash_hex(vocab_hash);
  j["mode"] = std::string(to_string(model.mode));
  j["alpha"] = model.alpha;
  j["feature_count"] = model.feature_count;
  j["classes"] = model.classes;
  j["prior"] = model.prior;
  j["prob"] = model.prob;
  out << j.dump() << '\n';
}

void save_model(std::ostream& out, const LinearModel& model, std::uint64_t vocab_hash) {
  nlohmann::json j;
  j["format"] = "opgram-model";
  j["version"] = 1;
  j["algorithm"] = "svm";
  j["vocab_hash"] = hash_hex(vocab_hash);
  j["feature_count"] = model.feature_count;
  j["classes"] = model.classes;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["config"] = {{"seed", model.config.seed},
                 {"epochs", model.config.epochs},
                 {"lambda", model.config.lambda},
                 {"schedule", "inverse-scaled"}};
  out << j.dump() << '\n';
}

NBModel load_nb_model(std::istream& in, std::uint64_t expected_vocab_hash) {
  nlohmann::json j = parse_model_json(in, expected_vocab_hash, "nb");
  NBModel model;
  try {
    model.mode = mode_from_string(j.at("mode").get<std::string>());
    model.alpha = j.at("alpha").get<double>();
    model.feature_count = j.at("feature_count").get<std::size_t>();
    model.classes = j.at("classes").get<std::vector<std::string>>();
    model.prior = j.at("prior").get<std::vector<double>>();
    model.prob = j.at("prob").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::FormatError, std::string("bad nb model: ") + e.what());
  }
  model.finalize();
  return model;
}

LinearModel load_linear_model(std::istream& in, std::uint64_t expected_vocab_hash) {
  nlohmann::json j = parse_model_json(in, expected_vocab_hash, "svm");
  LinearModel model;
  try {
    model.feature_count = j.at("feature_count").get<std::size_t>();
    model.classes = j.at("classes").get<std::vector<std::string>>();
    model.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    model.bias = j.at("bias").get<std::vector<double>>();
    model.config.seed = j.at("config").at("seed").get<std::uint64_t>();
    model.config.epochs = j.at("config").at("epochs").get<std::size_t>();
    model.config.lambda = j.at("config").at("lambda").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::FormatError, std::string("bad svm model: ") + e.what());
  }
  return model;
}

}  // namespace opgram::io
