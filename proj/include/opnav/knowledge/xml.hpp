#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace opnav::xml {

/// Minimal element tree. Direct text content of an element is concatenated
/// into `text`; interleaving of text and child elements is not retained.
struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;
  std::vector<Element> children;

  std::optional<std::string> attribute(std::string_view key) const;

  bool operator==(const Element&) const = default;
};

/// Parses a UTF-8 document and returns its root element. Comments, processing
/// instructions and DOCTYPE declarations are skipped. Throws
/// Error(MalformedMarkup) with a "line:column" prefix on failure.
Element parse(std::string_view document);

std::string escape_text(std::string_view raw);
std::string escape_attribute(std::string_view raw);

/// Appends the element as indented markup.
void write(const Element& element, std::string& out, int depth = 0);

}  // namespace opnav::xml
