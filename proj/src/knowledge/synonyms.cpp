#include "opnav/knowledge/synonyms.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "opnav/error.hpp"

namespace opnav {

namespace {

std::string normalize_word(std::string_view raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
  std::string out(raw.substr(b, e - b));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

SynonymTable::SynonymTable(std::vector<std::vector<std::string>> groups) {
  for (auto& group : groups) {
    std::vector<std::string> cleaned;
    for (const auto& raw : group) {
      auto word = normalize_word(raw);
      if (word.empty() || std::find(cleaned.begin(), cleaned.end(), word) != cleaned.end()) continue;
      if (index_.count(word)) {
        throw Error(ErrorCode::InvalidArgument, "synonym '" + word + "' appears in more than one group");
      }
      index_.emplace(word, groups_.size());
      cleaned.push_back(std::move(word));
    }
    if (!cleaned.empty()) groups_.push_back(std::move(cleaned));
  }
}

const std::vector<std::string>* SynonymTable::group_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? nullptr : &groups_[it->second];
}

SynonymTable parse_synonyms(std::string_view text) {
  std::vector<std::vector<std::string>> groups;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::vector<std::string> group;
    std::istringstream fields(line);
    std::string word;
    while (std::getline(fields, word, ',')) {
      if (!normalize_word(word).empty()) group.push_back(word);
    }
    if (!group.empty()) groups.push_back(std::move(group));
  }
  return SynonymTable(std::move(groups));
}

SynonymTable load_synonyms(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read synonyms file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_synonyms(buf.str());
}

}  // namespace opnav
