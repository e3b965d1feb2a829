#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lmap {

struct CategoryEntry {
  std::string label;
  std::vector<std::string> keywords;
};

/// Keyword rule table used as the offline label provider.
class CategoryTable {
 public:
  CategoryTable() = default;
  /// Throws InputError on duplicate labels or empty keywords.
  explicit CategoryTable(std::vector<CategoryEntry> entries);

  const std::vector<CategoryEntry>& entries() const { return entries_; }
  std::vector<std::string> labels() const;

 private:
  std::vector<CategoryEntry> entries_;
};

/// Label whose keyword gives the longest case-insensitive substring match in
/// `note`; equal lengths resolve to the lexicographically smallest label.
std::optional<std::string> identify_label(std::string_view note, const CategoryTable& table);

std::string ascii_lower(std::string_view text);

}  // namespace lmap
