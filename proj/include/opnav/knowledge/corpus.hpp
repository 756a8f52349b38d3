#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "opnav/knowledge/xml.hpp"

namespace opnav {

enum class NodeType { safety, hazard, operation, maintenance, message, quality, tooling, generic };

std::string_view to_string(NodeType type);
std::optional<NodeType> parse_node_type(std::string_view text);

using NodeId = std::string;

struct ContentNode {
  NodeId id;
  std::string title;
  std::string body;
  NodeType node_type = NodeType::generic;
  std::set<std::string> keywords;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  std::vector<NodeId> related;
  std::vector<std::string> media_refs;
  // Attributes and elements outside the known vocabulary, kept for round-trip.
  std::vector<std::pair<std::string, std::string>> extra_attributes;
  std::vector<xml::Element> extensions;

  bool operator==(const ContentNode&) const = default;
};

/// Hierarchical corpus. Nodes are kept in insertion (document) order; lookup
/// by id goes through a side index that resolves to the first node carrying
/// that id. The tree is treated as immutable once built.
class ContentTree {
 public:
  ContentTree() = default;

  /// Builds a tree from raw parts without checking invariants; see validate().
  static ContentTree from_nodes(NodeId root, std::vector<ContentNode> nodes,
                                std::uint64_t version = 1);

  const NodeId& root() const noexcept { return root_; }
  std::uint64_t version() const noexcept { return version_; }
  const std::vector<ContentNode>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  const ContentNode* find(std::string_view id) const;
  const ContentNode& at(std::string_view id) const;  // throws UnknownNode

  /// Copy of this tree with the version incremented.
  ContentTree next_version() const;

  /// Longest root-to-leaf path counted in nodes (root alone has depth 1).
  std::size_t depth() const;

  /// Structural equality: same root, version and node set by id with equal
  /// fields. Child order matters, storage order does not.
  friend bool operator==(const ContentTree& a, const ContentTree& b);

 private:
  void reindex();

  NodeId root_;
  std::vector<ContentNode> nodes_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::uint64_t version_ = 1;
};

struct Violation {
  std::string rule;  // e.g. "DuplicateId", "InconsistentParent"
  NodeId node_id;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

/// Parses corpus markup. The document element is either `<corpus version="N">`
/// wrapping exactly one top-level `<node>`, or a bare `<node>`.
/// Throws Error with MalformedMarkup, DuplicateId, DanglingReference or
/// MultipleRoots.
ContentTree parse_corpus(std::string_view markup);
ContentTree load_corpus(const std::string& path);

std::string serialize_corpus(const ContentTree& tree);

/// Checks every tree invariant. Never throws; violations are reported as data.
std::vector<Violation> validate(const ContentTree& tree);

}  // namespace opnav
