#include "opgram/structure.hpp"

#include <algorithm>

namespace opgram {

std::string_view to_string(ExtensionClass c) noexcept {
  switch (c) {
    case ExtensionClass::New: return "new";
    case ExtensionClass::PrefixExtended: return "prefix";
    case ExtensionClass::SuffixExtended: return "suffix";
    case ExtensionClass::Overlap: return "overlap";
  }
  return "new";
}

ExtensionClass classify_extension(std::string_view key,
                                  const std::unordered_set<std::string>& prev) {
  if (key.size() < 4 || key.size() % 2 != 0) {
    fail(ErrorKind::LengthMismatch,
         "extension classification needs an n-gram key with n >= 2, got '" + std::string(key) + "'");
  }
  const std::string prefix(key.substr(0, key.size() - 2));
  const std::string suffix(key.substr(2));
  const bool has_prefix = prev.contains(prefix);
  const bool has_suffix = prev.contains(suffix);
  if (has_prefix && has_suffix) return ExtensionClass::Overlap;
  if (has_prefix) return ExtensionClass::PrefixExtended;
  if (has_suffix) return ExtensionClass::SuffixExtended;
  return ExtensionClass::New;
}

ExtensionReport extension_report(
    const std::map<std::size_t, std::vector<std::string>>& selected_by_n) {
  ExtensionReport report;
  if (selected_by_n.size() < 2) return report;

  for (auto it = selected_by_n.begin(); it != selected_by_n.end(); ++it) {
    auto next = std::next(it);
    if (next == selected_by_n.end()) break;
    if (next->first != it->first + 1) {
      fail(ErrorKind::MissingLevel,
           "no selected " + std::to_string(it->first + 1) + "-gram set between levels " +
               std::to_string(it->first) + " and " + std::to_string(next->first));
    }
  }

  for (auto it = std::next(selected_by_n.begin()); it != selected_by_n.end(); ++it) {
    const std::size_t n = it->first;
    const auto& prev_keys = std::prev(it)->second;

    std::unordered_set<std::string> prev;
    prev.reserve(prev_keys.size());
    for (const auto& key : prev_keys) {
      if (key.size() != 2 * (n - 1)) {
        fail(ErrorKind::LengthMismatch,
             "key '" + key + "' in level " + std::to_string(n - 1) + " has the wrong length");
      }
      prev.insert(key);
    }

    ExtensionReport::Row row;
    row.n = n;
    for (const auto& key : it->second) {
      if (key.size() != 2 * n) {
        fail(ErrorKind::LengthMismatch,
             "key '" + key + "' in level " + std::to_string(n) + " has the wrong length");
      }
      ExtensionClass cls = classify_extension(key, prev);
      switch (cls) {
        case ExtensionClass::New: ++row.new_count; break;
        case ExtensionClass::PrefixExtended: ++row.prefix_count; break;
        case ExtensionClass::SuffixExtended: ++row.suffix_count; break;
        case ExtensionClass::Overlap: ++row.overlap_count; break;
      }
      row.grams.emplace_back(key, cls);
    }
    std::sort(row.grams.begin(), row.grams.end());
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace opgram
