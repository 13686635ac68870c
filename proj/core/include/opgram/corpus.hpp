#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opgram/opcodes.hpp"

namespace opgram {

/// Ordered opcode bytes of one method body. N-grams never cross methods.
using MethodSequence = std::vector<OpcodeByte>;

enum class Label { Benign, Malware };

std::string_view to_string(Label label) noexcept;
Label label_from_string(std::string_view s);

struct AppRecord {
  std::string id;
  Label label = Label::Benign;
  std::optional<std::string> family;  // required for malware in categorization runs
  std::vector<MethodSequence> methods;
};

struct ManifestEntry {
  std::string id;
  Label label = Label::Benign;
  std::optional<std::string> family;
  std::filesystem::path path;
};

/// JSON Lines dataset manifest, one object per app:
///   {"id": "...", "label": "benign"|"malware", "family": "...", "path": "..."}
/// Relative paths resolve against the manifest's directory.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  static DatasetManifest load(const std::filesystem::path& jsonl_path);
};

enum class SmaliMode { Lenient, Strict };

struct SmaliResult {
  std::vector<MethodSequence> methods;
  std::size_t skipped_instructions = 0;  // unknown mnemonics dropped in lenient mode
};

/// Parses a smali class body into per-method opcode sequences. Directives,
/// labels, comments and switch/array payload blocks contribute nothing; every
/// instruction line contributes the byte of its leading mnemonic.
SmaliResult parse_smali(std::string_view text, const OpcodeTable& table,
                        SmaliMode mode = SmaliMode::Lenient);

/// Parses the plain ops fixture format: one method per line, whitespace
/// separated two-digit lowercase hex byte tokens, `#` starts a comment line.
std::vector<MethodSequence> parse_ops(std::string_view text);

struct LoadOptions {
  SmaliMode smali_mode = SmaliMode::Lenient;
  unsigned threads = 1;
};

/// Loads every manifest entry (.smali file or directory of smali files,
/// .ops file) and returns AppRecords in manifest order. Parsing may run on
/// several threads; the result order never depends on scheduling.
std::vector<AppRecord> load_corpus(const DatasetManifest& manifest, const OpcodeTable& table,
                                   const LoadOptions& options = {});

}  // namespace opgram
