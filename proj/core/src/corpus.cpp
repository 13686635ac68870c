#include "opgram/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "parallel.hpp"

namespace opgram {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string_view first_token(std::string_view s) {
  std::size_t end = s.find_first_of(" \t");
  return end == std::string_view::npos ? s : s.substr(0, end);
}

bool has_whitespace(std::string_view s) {
  return s.find_first_of(" \t\r\n") != std::string_view::npos;
}

int lower_hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

// Directive blocks whose body must not be scanned for instructions. Payload
// entries (switch targets, array values) would otherwise look like lines.
bool is_skip_block_directive(std::string_view directive) {
  return directive == ".packed-switch" || directive == ".sparse-switch" ||
         directive == ".array-data" || directive == ".annotation" ||
         directive == ".subannotation";
}

std::string read_file(const std::filesystem::path& path, const std::string& app_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorKind::IoError, "app '" + app_id + "': cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

}  // namespace

std::string_view to_string(Label label) noexcept {
  return label == Label::Benign ? "benign" : "malware";
}

Label label_from_string(std::string_view s) {
  if (s == "benign") return Label::Benign;
  if (s == "malware") return Label::Malware;
  fail(ErrorKind::FormatError, "unknown label '" + std::string(s) + "' (expected benign|malware)");
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& jsonl_path) {
  std::ifstream in(jsonl_path);
  if (!in) {
    fail(ErrorKind::IoError, "cannot open manifest '" + jsonl_path.string() + "'");
  }
  const std::filesystem::path base = jsonl_path.parent_path();

  DatasetManifest manifest;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view stripped = trim(line);
    if (stripped.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(stripped);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::FormatError,
           "manifest line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("label") || !obj.contains("path")) {
      fail(ErrorKind::FormatError,
           "manifest line " + std::to_string(lineno) + ": need id, label and path fields");
    }

    ManifestEntry entry;
    entry.id = obj.at("id").get<std::string>();
    entry.label = label_from_string(obj.at("label").get<std::string>());
    if (obj.contains("family") && !obj.at("family").is_null()) {
      entry.family = obj.at("family").get<std::string>();
    }
    std::filesystem::path p = obj.at("path").get<std::string>();
    entry.path = p.is_absolute() ? p : base / p;

    if (entry.id.empty() || has_whitespace(entry.id)) {
      fail(ErrorKind::FormatError,
           "manifest line " + std::to_string(lineno) + ": bad id '" + entry.id + "'");
    }
    if (entry.family && (entry.family->empty() || has_whitespace(*entry.family))) {
      fail(ErrorKind::FormatError,
           "manifest line " + std::to_string(lineno) + ": bad family '" + *entry.family + "'");
    }
    if (entry.family && entry.label == Label::Benign) {
      fail(ErrorKind::FormatError,
           "manifest line " + std::to_string(lineno) + ": benign app '" + entry.id + "' carries a family");
    }
    if (!seen.insert(entry.id).second) {
      fail(ErrorKind::DuplicateId, "app id '" + entry.id + "' appears twice in manifest");
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

SmaliResult parse_smali(std::string_view text, const OpcodeTable& table, SmaliMode mode) {
  SmaliResult result;
  MethodSequence current;
  bool in_method = false;
  std::string skip_block;  // non-empty while inside a payload/annotation block

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;

    if (!skip_block.empty()) {
      if (line.starts_with(".end")) {
        std::string_view rest = trim(line.substr(4));
        if (first_token(rest) == skip_block) skip_block.clear();
      }
      continue;
    }

    if (line[0] == '.') {
      std::string_view directive = first_token(line);
      if (directive == ".method") {
        if (in_method) fail(ErrorKind::MalformedSmali, "'.method' inside an open method block");
        in_method = true;
        current.clear();
      } else if (directive == ".end") {
        std::string_view what = first_token(trim(line.substr(4)));
        if (what == "method") {
          if (!in_method) fail(ErrorKind::MalformedSmali, "'.end method' without matching '.method'");
          result.methods.push_back(std::move(current));
          current = {};
          in_method = false;
        }
        // other .end directives close single-line-opened constructs; ignore
      } else if (is_skip_block_directive(directive)) {
        skip_block = directive.substr(1);
      }
      continue;
    }

    if (line[0] == ':') continue;  // label
    if (!in_method) continue;      // stray text outside any method

    std::string_view mnemonic = first_token(line);
    if (auto byte = table.find(mnemonic)) {
      current.push_back(*byte);
    } else if (mode == SmaliMode::Strict) {
      fail(ErrorKind::UnknownMnemonic, "unknown mnemonic '" + std::string(mnemonic) + "'");
    } else {
      ++result.skipped_instructions;
    }
  }

  if (in_method) fail(ErrorKind::MalformedSmali, "unterminated '.method' block");
  if (!skip_block.empty()) fail(ErrorKind::MalformedSmali, "unterminated '." + skip_block + "' block");
  return result;
}

std::vector<MethodSequence> parse_ops(std::string_view text) {
  std::vector<MethodSequence> methods;
  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++lineno;

    std::string_view line = trim(raw);
    if (!line.empty() && line[0] == '#') continue;

    MethodSequence method;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
      std::string_view token = line.substr(start, i - start);
      if (token.size() != 2 || lower_hex_digit(token[0]) < 0 || lower_hex_digit(token[1]) < 0) {
        fail(ErrorKind::BadHexToken,
             "line " + std::to_string(lineno) + ": bad byte token '" + std::string(token) + "'");
      }
      method.push_back(static_cast<OpcodeByte>(lower_hex_digit(token[0]) * 16 + lower_hex_digit(token[1])));
    }
    methods.push_back(std::move(method));
  }
  return methods;
}

namespace {

std::vector<MethodSequence> load_app_methods(const ManifestEntry& entry, const OpcodeTable& table,
                                             const LoadOptions& options) {
  namespace fs = std::filesystem;

  auto parse_one = [&](const fs::path& file) -> std::vector<MethodSequence> {
    std::string ext = file.extension().string();
    std::string text = read_file(file, entry.id);
    if (ext == ".smali") {
      return parse_smali(text, table, options.smali_mode).methods;
    }
    if (ext == ".ops") {
      try {
        return parse_ops(text);
      } catch (const Error& e) {
        throw Error(e.kind(), "app '" + entry.id + "' (" + file.string() + "): " + e.what());
      }
    }
    fail(ErrorKind::IoError,
         "app '" + entry.id + "': unsupported extension '" + ext + "' for '" + file.string() + "'");
  };

  std::error_code ec;
  if (fs::is_directory(entry.path, ec)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(entry.path, ec)) {
      if (e.is_regular_file() && e.path().extension() == ".smali") files.push_back(e.path());
    }
    if (ec) fail(ErrorKind::IoError, "app '" + entry.id + "': cannot walk '" + entry.path.string() + "'");
    std::sort(files.begin(), files.end());
    std::vector<MethodSequence> methods;
    for (const auto& f : files) {
      auto part = parse_one(f);
      methods.insert(methods.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
    }
    return methods;
  }
  return parse_one(entry.path);
}

}  // namespace

std::vector<AppRecord> load_corpus(const DatasetManifest& manifest, const OpcodeTable& table,
                                   const LoadOptions& options) {
  std::unordered_set<std::string> seen;
  for (const auto& entry : manifest.entries) {
    if (!seen.insert(entry.id).second) {
      fail(ErrorKind::DuplicateId, "app id '" + entry.id + "' appears twice in manifest");
    }
  }

  std::vector<AppRecord> corpus(manifest.entries.size());
  detail::parallel_for(manifest.entries.size(), options.threads, [&](std::size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    AppRecord app;
    app.id = entry.id;
    app.label = entry.label;
    app.family = entry.family;
    app.methods = load_app_methods(entry, table, options);
    corpus[i] = std::move(app);
  });
  return corpus;
}

}  // namespace opgram
