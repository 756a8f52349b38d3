#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "opnav/error.hpp"
#include "opnav/knowledge/corpus.hpp"

#define CHECK_THROWS_CODE(expr, expected)                      \
  do {                                                         \
    bool threw_ = false;                                       \
    try {                                                      \
      (void)(expr);                                            \
    } catch (const opnav::Error& e_) {                         \
      threw_ = true;                                           \
      CHECK_MESSAGE(e_.code() == (expected), e_.what());       \
    }                                                          \
    CHECK_MESSAGE(threw_, "expected opnav::Error from " #expr); \
  } while (0)

namespace testing {

inline std::string data_path(const std::string& rel) { return std::string(OPNAV_DATA_DIR) + "/" + rel; }
inline std::string golden_path(const std::string& rel) { return std::string(OPNAV_GOLDEN_DIR) + "/" + rel; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("opnav_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline opnav::ContentNode make_node(const std::string& id, const std::string& body,
                                    std::set<std::string> keywords = {}) {
  opnav::ContentNode n;
  n.id = id;
  n.title = id;
  n.body = body;
  n.keywords = std::move(keywords);
  return n;
}

/// Flat tree: a root "root" with the given leaves as children.
inline opnav::ContentTree flat_tree(std::vector<opnav::ContentNode> leaves) {
  opnav::ContentNode root;
  root.id = "root";
  root.title = "root";
  std::vector<opnav::ContentNode> nodes;
  for (auto& leaf : leaves) {
    leaf.parent = "root";
    root.children.push_back(leaf.id);
  }
  nodes.push_back(root);
  for (auto& leaf : leaves) nodes.push_back(leaf);
  return opnav::ContentTree::from_nodes("root", std::move(nodes));
}

/// Random valid tree with awkward text: markup characters, UTF-8, quotes.
inline opnav::ContentTree random_tree(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces{
      "spindle", "coolant", "a&b",   "<tag>",  "\"quoted\"", "it's", "lubrifica ție", "Ölstand",
      "压力",    "x > y",   "50%",   "tab\tin", "line\nbreak", "]]>", "&amp;", "grease", " padded "};
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto text = [&](std::size_t words) {
    std::string s;
    for (std::size_t i = 0; i < words; ++i) {
      if (i) s += ' ';
      s += pieces[pick(pieces.size())];
    }
    return s;
  };
  const std::size_t count = 1 + pick(25);
  std::vector<opnav::ContentNode> nodes(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto& n = nodes[i];
    n.id = "n" + std::to_string(i);
    n.title = text(1 + pick(3));
    n.node_type = static_cast<opnav::NodeType>(pick(8));
    if (pick(4)) n.body = text(1 + pick(12));
    for (std::size_t k = pick(4); k > 0; --k) n.keywords.insert(pieces[pick(pieces.size())]);
    if (pick(5) == 0) n.media_refs.push_back("media/" + std::to_string(i) + ".png");
    if (i > 0) {
      auto parent = pick(i);
      n.parent = nodes[parent].id;
      nodes[parent].children.push_back(n.id);
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (pick(3) == 0) nodes[i].related.push_back(nodes[pick(count)].id);
  }
  return opnav::ContentTree::from_nodes("n0", std::move(nodes), 1 + pick(50));
}

}  // namespace testing
