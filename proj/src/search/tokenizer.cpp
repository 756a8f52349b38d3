#include "opnav/search/tokenizer.hpp"

namespace opnav {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

}  // namespace

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words{
      "a",   "an",   "and", "are",  "as",  "at",   "be",   "by",   "can", "do",   "does",
      "for", "from", "how", "i",    "in",  "is",   "it",   "my",   "of",  "on",   "or",
      "the", "this", "to",  "what", "when", "where", "which", "with", "you", "should",
  };
  return words;
}

Tokenizer::Tokenizer() : stopwords_(default_stopwords()) {}

Tokenizer::Tokenizer(std::set<std::string> stopwords) : stopwords_(std::move(stopwords)) {}

std::vector<std::string> Tokenizer::operator()(std::string_view text) const {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !stopwords_.count(current)) tokens.push_back(current);
    current.clear();
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

}  // namespace opnav
