#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "opgram/error.hpp"

namespace opgram {

using OpcodeByte = std::uint8_t;

/// The five opcode families tracked by the classifier plus a catch-all for
/// everything outside their byte ranges.
enum class OpcodeGroup { Move, Branch, GetterSetter, Invoke, LogicArith, Other };

OpcodeGroup group_of(OpcodeByte b) noexcept;
std::string_view to_string(OpcodeGroup g) noexcept;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

/// Bidirectional byte <-> mnemonic map over the full 0x00..0xFF range.
/// Bytes with no defined Dalvik instruction carry the mnemonic "unused-XX".
class OpcodeTable {
 public:
  OpcodeTable();

  /// Shared immutable default table.
  static const OpcodeTable& dalvik();

  std::string_view mnemonic(OpcodeByte b) const noexcept { return mnemonics_[b]; }

  /// Throws UnknownMnemonic for strings absent from the table.
  OpcodeByte byte_of(std::string_view mnemonic) const;
  std::optional<OpcodeByte> find(std::string_view mnemonic) const noexcept;

  /// Applies a `hex<TAB>mnemonic` override file. Each row replaces the
  /// mnemonic of one byte; `#` lines are skipped.
  void apply_overrides(std::istream& tsv);

 private:
  void set(OpcodeByte b, std::string mnemonic);

  std::array<std::string, 256> mnemonics_;
  std::unordered_map<std::string, OpcodeByte, StringHash, std::equal_to<>> byte_of_;
};

/// Renders opcode bytes as the canonical 2n-digit lowercase hex key,
/// e.g. {0x08, 0x54, 0x6e} -> "08546e". Throws EmptyInput.
std::string ngram_key(std::span<const OpcodeByte> bytes);

/// Inverse of ngram_key. Throws EmptyInput / BadHexToken.
std::vector<OpcodeByte> parse_ngram_key(std::string_view key);

}  // namespace opgram
