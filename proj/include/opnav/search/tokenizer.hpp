#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace opnav {

/// Lower-cases ASCII, splits on runs of non-alphanumeric bytes and drops
/// stopwords. Bytes >= 0x80 count as word characters so UTF-8 words stay whole.
class Tokenizer {
 public:
  /// Uses default_stopwords().
  Tokenizer();
  explicit Tokenizer(std::set<std::string> stopwords);

  std::vector<std::string> operator()(std::string_view text) const;

  const std::set<std::string>& stopwords() const noexcept { return stopwords_; }

 private:
  std::set<std::string> stopwords_;
};

const std::set<std::string>& default_stopwords();

}  // namespace opnav
