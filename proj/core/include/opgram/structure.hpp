#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "opgram/error.hpp"

namespace opgram {

/// How a selected n-gram relates to the selected (n-1)-gram set: both its
/// length-(n-1) prefix and suffix selected (Overlap), exactly one of them
/// (PrefixExtended / SuffixExtended), or neither (New).
enum class ExtensionClass { New, PrefixExtended, SuffixExtended, Overlap };

std::string_view to_string(ExtensionClass c) noexcept;

ExtensionClass classify_extension(std::string_view key,
                                  const std::unordered_set<std::string>& prev);

struct ExtensionReport {
  struct Row {
    std::size_t n = 0;
    std::uint64_t new_count = 0;
    std::uint64_t prefix_count = 0;
    std::uint64_t suffix_count = 0;
    std::uint64_t overlap_count = 0;
    /// Per-gram classification, sorted by key.
    std::vector<std::pair<std::string, ExtensionClass>> grams;

    std::uint64_t total() const {
      return new_count + prefix_count + suffix_count + overlap_count;
    }
  };
  std::vector<Row> rows;  // ascending n, one per level that has a predecessor
};

/// Classifies each selected n-gram against the selected (n-1)-gram set for
/// every consecutive pair of levels in `selected_by_n`. Levels must be
/// consecutive; a gap raises MissingLevel.
ExtensionReport extension_report(
    const std::map<std::size_t, std::vector<std::string>>& selected_by_n);

}  // namespace opgram
