#include "lmap/identify.hpp"

#include <algorithm>
#include <set>

#include "lmap/core.hpp"

namespace lmap {

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

CategoryTable::CategoryTable(std::vector<CategoryEntry> entries) : entries_(std::move(entries)) {
  std::set<std::string> seen;
  for (const auto& e : entries_) {
    if (!seen.insert(e.label).second) {
      throw InputError("category table: duplicate label '" + e.label + "'");
    }
    for (const auto& k : e.keywords) {
      if (k.empty()) throw InputError("category table: empty keyword for '" + e.label + "'");
    }
  }
}

std::vector<std::string> CategoryTable::labels() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.label);
  return out;
}

std::optional<std::string> identify_label(std::string_view note, const CategoryTable& table) {
  if (note.empty()) throw InputError("identify_label: empty note");
  const std::string haystack = ascii_lower(note);
  const std::string* best_label = nullptr;
  std::size_t best_len = 0;
  for (const auto& entry : table.entries()) {
    for (const auto& keyword : entry.keywords) {
      if (keyword.size() < best_len) continue;
      if (haystack.find(ascii_lower(keyword)) == std::string::npos) continue;
      if (keyword.size() > best_len || best_label == nullptr || entry.label < *best_label) {
        best_len = keyword.size();
        best_label = &entry.label;
      }
    }
  }
  if (best_label == nullptr) return std::nullopt;
  return *best_label;
}

}  // namespace lmap
