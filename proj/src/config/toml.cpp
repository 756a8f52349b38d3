#include "opnav/config/toml.hpp"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "opnav/error.hpp"

namespace opnav::config {

namespace {

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no) : s_(line), line_no_(line_no) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ConfigError, "toml line " + std::to_string(line_no_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  bool at_comment_or_end() {
    skip_space();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }

  bool consume(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string key() {
    skip_space();
    if (pos_ < s_.size() && (s_[pos_] == '"' || s_[pos_] == '\'')) return string_value();
    auto start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '-')) {
      ++pos_;
    }
    if (start == pos_) fail("expected key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::uint32_t hex_code_point(std::size_t digits) {
    if (pos_ + digits > s_.size()) fail("truncated unicode escape");
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      const char h = s_[pos_++];
      if (!std::isxdigit(static_cast<unsigned char>(h))) fail("bad unicode escape");
      cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(h)) ? h - '0' : (h | 0x20) - 'a' + 10);
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("unicode escape is not a scalar value");
    return cp;
  }

  static void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::string string_value() {
    char quote = s_[pos_++];
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != quote) {
      char c = s_[pos_++];
      if (quote == '"' && c == '\\') {
        if (pos_ >= s_.size()) fail("dangling escape");
        char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '\\': out += '\\'; break;
          case '"': out += '"'; break;
          case 'u':
          case 'U': append_utf8(out, hex_code_point(e == 'u' ? 4 : 8)); break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  nlohmann::json value() {
    skip_space();
    if (pos_ >= s_.size()) fail("expected value");
    char c = s_[pos_];
    if (c == '"' || c == '\'') {
      if (s_.substr(pos_, 3) == "\"\"\"" || s_.substr(pos_, 3) == "'''") fail("multi-line strings are not supported");
      return string_value();
    }
    if (c == '[') {
      ++pos_;
      auto arr = nlohmann::json::array();
      for (;;) {
        skip_space();
        if (consume(']')) break;
        arr.push_back(value());
        if (consume(',')) continue;
        if (consume(']')) break;
        fail("expected ',' or ']' in array");
      }
      return arr;
    }
    if (c == '{') fail("inline tables are not supported");
    auto start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' && s_[pos_] != ' ' &&
           s_[pos_] != '\t') {
      ++pos_;
    }
    std::string token(s_.substr(start, pos_ - start));
    if (token == "true") return true;
    if (token == "false") return false;
    std::string digits;
    for (char ch : token) {
      if (ch != '_') digits += ch;
    }
    if (digits.empty()) fail("expected value");
    bool is_float = digits.find_first_of(".eE") != std::string::npos || digits == "inf" || digits == "nan";
    try {
      std::size_t used = 0;
      if (is_float) {
        double d = std::stod(digits, &used);
        if (used == digits.size()) return d;
      } else {
        long long i = std::stoll(digits, &used, 10);
        if (used == digits.size()) return i;
      }
    } catch (const std::exception&) {
    }
    fail("invalid value '" + token + "'");
  }

  std::size_t pos_ = 0;

 private:
  std::string_view s_;
  std::size_t line_no_;
};

}  // namespace

nlohmann::json parse_toml(std::string_view text) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* current = &root;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    LineParser p(line, line_no);
    if (p.at_comment_or_end()) continue;
    if (p.consume('[')) {
      bool array_table = p.consume('[');
      auto name = p.key();
      if (!p.consume(']') || (array_table && !p.consume(']'))) p.fail("malformed table header");
      if (!p.at_comment_or_end()) p.fail("trailing characters after table header");
      if (array_table) {
        auto& arr = root[name];
        if (arr.is_null()) arr = nlohmann::json::array();
        if (!arr.is_array()) p.fail("'" + name + "' is not an array of tables");
        arr.push_back(nlohmann::json::object());
        current = &arr.back();
      } else {
        if (root.contains(name)) p.fail("table '" + name + "' defined twice");
        root[name] = nlohmann::json::object();
        current = &root[name];
      }
      continue;
    }
    auto key = p.key();
    p.skip_space();
    if (p.consume('.')) p.fail("dotted keys are not supported");
    if (!p.consume('=')) p.fail("expected '=' after key '" + key + "'");
    auto v = p.value();
    if (!p.at_comment_or_end()) p.fail("trailing characters after value");
    if (current->contains(key)) p.fail("duplicate key '" + key + "'");
    (*current)[key] = std::move(v);
  }
  return root;
}

nlohmann::json load_toml(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_toml(buf.str());
}

}  // namespace opnav::config
