#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace opnav {

/// Groups of interchangeable words. Each word belongs to at most one group
/// and is stored lower-cased.
class SynonymTable {
 public:
  SynonymTable() = default;

  /// Throws Error(InvalidArgument) if a word would join a second group.
  explicit SynonymTable(std::vector<std::vector<std::string>> groups);

  const std::vector<std::vector<std::string>>& groups() const noexcept { return groups_; }

  /// Group containing `word`, or nullptr.
  const std::vector<std::string>* group_of(std::string_view word) const;

 private:
  std::vector<std::vector<std::string>> groups_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// One group per line, comma-separated words, `#` starts a comment.
SynonymTable parse_synonyms(std::string_view text);
SynonymTable load_synonyms(const std::string& path);

}  // namespace opnav
