#include "opnav/knowledge/xml.hpp"

#include <cstdint>

#include "opnav/error.hpp"

namespace opnav::xml {

std::optional<std::string> Element::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return v;
  }
  return std::nullopt;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || (u >= '0' && u <= '9') ||
         c == '_' || c == '-' || c == '.' || c == ':' || u >= 0x80;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

void append_utf8(std::string& out, std::uint32_t cp) {
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

class Parser {
 public:
  explicit Parser(std::string_view doc) : doc_(doc) {}

  Element parse_document() {
    skip_misc();
    if (at_end() || peek() != '<') fail("expected root element");
    Element root = parse_element();
    skip_misc();
    if (!at_end()) fail("content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < doc_.size(); ++i) {
      if (doc_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::MalformedMarkup,
                std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }

  bool at_end() const { return pos_ >= doc_.size(); }
  char peek() const { return doc_[pos_]; }
  bool starts_with(std::string_view s) const { return doc_.substr(pos_, s.size()) == s; }

  void expect(std::string_view s) {
    if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
    pos_ += s.size();
  }

  void skip_space() {
    while (!at_end() && is_space(peek())) ++pos_;
  }

  void skip_until(std::string_view terminator, const char* what) {
    auto end = doc_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
    pos_ = end + terminator.size();
  }

  // Whitespace, comments, processing instructions and DOCTYPE outside the root.
  void skip_misc() {
    for (;;) {
      skip_space();
      if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<!DOCTYPE")) {
        skip_until(">", "DOCTYPE");
      } else {
        return;
      }
    }
  }

  std::string parse_name() {
    auto start = pos_;
    while (!at_end() && is_name_char(peek())) ++pos_;
    if (start == pos_) fail("expected name");
    return std::string(doc_.substr(start, pos_ - start));
  }

  void decode_entity(std::string& out) {
    auto semi = doc_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail("unterminated entity");
    auto ent = doc_.substr(pos_ + 1, semi - pos_ - 1);
    if (ent == "lt") {
      out += '<';
    } else if (ent == "gt") {
      out += '>';
    } else if (ent == "amp") {
      out += '&';
    } else if (ent == "quot") {
      out += '"';
    } else if (ent == "apos") {
      out += '\'';
    } else if (!ent.empty() && ent[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
      auto digits = ent.substr(hex ? 2 : 1);
      if (digits.empty()) fail("empty character reference");
      for (char c : digits) {
        int v;
        if (c >= '0' && c <= '9') {
          v = c - '0';
        } else if (hex && c >= 'a' && c <= 'f') {
          v = c - 'a' + 10;
        } else if (hex && c >= 'A' && c <= 'F') {
          v = c - 'A' + 10;
        } else {
          fail("bad character reference");
        }
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
        if (cp > 0x10FFFF) fail("character reference out of range");
      }
      append_utf8(out, cp);
    } else {
      fail("unknown entity '&" + std::string(ent) + ";'");
    }
    pos_ = semi + 1;
  }

  std::string parse_attribute_value() {
    if (at_end() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
    char quote = peek();
    ++pos_;
    std::string value;
    while (!at_end() && peek() != quote) {
      if (peek() == '<') fail("'<' in attribute value");
      if (peek() == '&') {
        decode_entity(value);
      } else {
        value += peek();
        ++pos_;
      }
    }
    if (at_end()) fail("unterminated attribute value");
    ++pos_;
    return value;
  }

  Element parse_element() {
    expect("<");
    Element el;
    el.name = parse_name();
    for (;;) {
      bool had_space = !at_end() && is_space(peek());
      skip_space();
      if (at_end()) fail("unterminated start tag");
      if (starts_with("/>")) {
        pos_ += 2;
        return el;
      }
      if (peek() == '>') {
        ++pos_;
        break;
      }
      if (!had_space) fail("expected whitespace before attribute");
      auto key = parse_name();
      skip_space();
      expect("=");
      skip_space();
      if (el.attribute(key)) fail("duplicate attribute '" + key + "'");
      el.attributes.emplace_back(std::move(key), parse_attribute_value());
    }

    std::string text;
    for (;;) {
      if (at_end()) fail("unterminated element <" + el.name + ">");
      if (starts_with("</")) {
        pos_ += 2;
        auto closing = parse_name();
        if (closing != el.name) {
          fail("mismatched closing tag </" + closing + "> for <" + el.name + ">");
        }
        skip_space();
        expect(">");
        break;
      }
      if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<![CDATA[")) {
        pos_ += 9;
        auto end = doc_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        text.append(doc_.substr(pos_, end - pos_));
        pos_ = end + 3;
      } else if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (peek() == '<') {
        el.children.push_back(parse_element());
      } else if (peek() == '&') {
        decode_entity(text);
      } else {
        text += peek();
        ++pos_;
      }
    }
    el.text = el.children.empty() ? std::move(text) : trim(text);
    return el;
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
};

void escape_into(std::string& out, std::string_view raw, bool attribute) {
  for (char c : raw) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"':
        if (attribute) {
          out += "&quot;";
        } else {
          out += c;
        }
        break;
      case '\n':
        if (attribute) {
          out += "&#10;";
        } else {
          out += c;
        }
        break;
      case '\r': out += "&#13;"; break;
      case '\t':
        if (attribute) {
          out += "&#9;";
        } else {
          out += c;
        }
        break;
      default: out += c;
    }
  }
}

}  // namespace

Element parse(std::string_view document) { return Parser(document).parse_document(); }

std::string escape_text(std::string_view raw) {
  std::string out;
  escape_into(out, raw, false);
  return out;
}

std::string escape_attribute(std::string_view raw) {
  std::string out;
  escape_into(out, raw, true);
  return out;
}

void write(const Element& element, std::string& out, int depth) {
  std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  out += indent;
  out += '<';
  out += element.name;
  for (const auto& [k, v] : element.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    escape_into(out, v, true);
    out += '"';
  }
  if (element.children.empty() && element.text.empty()) {
    out += "/>\n";
    return;
  }
  out += '>';
  if (element.children.empty()) {
    escape_into(out, element.text, false);
  } else {
    if (!element.text.empty()) {
      out += '\n';
      out += indent;
      out += "  ";
      escape_into(out, element.text, false);
    }
    out += '\n';
    for (const auto& child : element.children) write(child, out, depth + 1);
    out += indent;
  }
  out += "</";
  out += element.name;
  out += ">\n";
}

}  // namespace opnav::xml
