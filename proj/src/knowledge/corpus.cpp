#include "opnav/knowledge/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_set>

#include "opnav/error.hpp"

namespace opnav {

namespace {

constexpr std::array<std::pair<NodeType, std::string_view>, 8> kNodeTypeNames{{
    {NodeType::safety, "safety"},
    {NodeType::hazard, "hazard"},
    {NodeType::operation, "operation"},
    {NodeType::maintenance, "maintenance"},
    {NodeType::message, "message"},
    {NodeType::quality, "quality"},
    {NodeType::tooling, "tooling"},
    {NodeType::generic, "generic"},
}};

std::string trim(std::string_view s) {
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  std::size_t b = 0, e = s.size();
  while (b < e && space(s[b])) ++b;
  while (e > b && space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

// Surrounding whitespace is layout unless the element asks to keep it.
std::string element_text(const xml::Element& el) {
  return el.attribute("xml:space") == "preserve" ? el.text : trim(el.text);
}

xml::Element text_element(const char* name, const std::string& text) {
  xml::Element el{name, {}, text, {}};
  if (trim(text) != text) el.attributes.push_back({"xml:space", "preserve"});
  return el;
}

std::uint64_t parse_version(const std::string& text) {
  std::uint64_t v = 0;
  if (text.empty()) throw Error(ErrorCode::MalformedMarkup, "corpus version must be a positive integer");
  for (char c : text) {
    if (c < '0' || c > '9') {
      throw Error(ErrorCode::MalformedMarkup, "corpus version must be a positive integer: '" + text + "'");
    }
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

struct Builder {
  std::vector<ContentNode> nodes;
  std::unordered_set<std::string> seen;

  void visit(const xml::Element& el, const std::optional<NodeId>& parent) {
    ContentNode node;
    node.parent = parent;
    bool have_id = false, have_title = false;
    for (const auto& [k, v] : el.attributes) {
      if (k == "id") {
        node.id = v;
        have_id = true;
      } else if (k == "title") {
        node.title = v;
        have_title = true;
      } else if (k == "type") {
        auto t = parse_node_type(v);
        if (!t) throw Error(ErrorCode::MalformedMarkup, "node '" + node.id + "': unknown type '" + v + "'");
        node.node_type = *t;
      } else {
        node.extra_attributes.emplace_back(k, v);
      }
    }
    if (!have_id || node.id.empty()) throw Error(ErrorCode::MalformedMarkup, "<node> without id attribute");
    if (!have_title) node.title.clear();
    if (!seen.insert(node.id).second) throw Error(ErrorCode::DuplicateId, "duplicate node id '" + node.id + "'");

    auto self = nodes.size();
    nodes.push_back(node);
    std::vector<const xml::Element*> child_elements;
    for (const auto& child : el.children) {
      if (child.name == "node") {
        child_elements.push_back(&child);
      } else if (child.name == "body") {
        nodes[self].body = element_text(child);
      } else if (child.name == "kw") {
        auto kw = element_text(child);
        if (!kw.empty()) nodes[self].keywords.insert(kw);
      } else if (child.name == "related") {
        auto ref = child.attribute("ref");
        if (!ref) throw Error(ErrorCode::MalformedMarkup, "node '" + node.id + "': <related> without ref");
        nodes[self].related.push_back(*ref);
      } else if (child.name == "media") {
        auto path = child.attribute("path");
        if (!path) throw Error(ErrorCode::MalformedMarkup, "node '" + node.id + "': <media> without path");
        nodes[self].media_refs.push_back(*path);
      } else {
        nodes[self].extensions.push_back(child);
      }
    }
    for (const auto* child : child_elements) {
      auto id = child->attribute("id").value_or("");
      nodes[self].children.push_back(id);
      visit(*child, nodes[self].id);
    }
  }
};

xml::Element to_element(const ContentTree& tree, const ContentNode& node) {
  xml::Element el;
  el.name = "node";
  el.attributes.emplace_back("id", node.id);
  el.attributes.emplace_back("title", node.title);
  el.attributes.emplace_back("type", std::string(to_string(node.node_type)));
  for (const auto& kv : node.extra_attributes) el.attributes.push_back(kv);
  if (!node.body.empty()) el.children.push_back(text_element("body", node.body));
  for (const auto& kw : node.keywords) el.children.push_back(text_element("kw", kw));
  for (const auto& ref : node.related) el.children.push_back({"related", {{"ref", ref}}, {}, {}});
  for (const auto& path : node.media_refs) el.children.push_back({"media", {{"path", path}}, {}, {}});
  for (const auto& ext : node.extensions) el.children.push_back(ext);
  for (const auto& child_id : node.children) {
    if (const auto* child = tree.find(child_id)) el.children.push_back(to_element(tree, *child));
  }
  return el;
}

}  // namespace

std::string_view to_string(NodeType type) {
  for (const auto& [t, name] : kNodeTypeNames) {
    if (t == type) return name;
  }
  return "generic";
}

std::optional<NodeType> parse_node_type(std::string_view text) {
  for (const auto& [t, name] : kNodeTypeNames) {
    if (name == text) return t;
  }
  return std::nullopt;
}

ContentTree ContentTree::from_nodes(NodeId root, std::vector<ContentNode> nodes, std::uint64_t version) {
  ContentTree tree;
  tree.root_ = std::move(root);
  tree.nodes_ = std::move(nodes);
  tree.version_ = version;
  tree.reindex();
  return tree;
}

void ContentTree::reindex() {
  by_id_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i) by_id_.try_emplace(nodes_[i].id, i);
}

const ContentNode* ContentTree::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &nodes_[it->second];
}

const ContentNode& ContentTree::at(std::string_view id) const {
  const auto* node = find(id);
  if (!node) throw Error(ErrorCode::UnknownNode, "unknown node '" + std::string(id) + "'");
  return *node;
}

ContentTree ContentTree::next_version() const {
  ContentTree copy = *this;
  ++copy.version_;
  return copy;
}

std::size_t ContentTree::depth() const {
  const auto* root = find(root_);
  if (!root) return 0;
  std::size_t best = 0;
  std::unordered_set<std::string> visited;
  std::function<void(const ContentNode&, std::size_t)> walk = [&](const ContentNode& n, std::size_t d) {
    if (!visited.insert(n.id).second) return;
    best = std::max(best, d);
    for (const auto& c : n.children) {
      if (const auto* child = find(c)) walk(*child, d + 1);
    }
  };
  walk(*root, 1);
  return best;
}

bool operator==(const ContentTree& a, const ContentTree& b) {
  if (a.root_ != b.root_ || a.version_ != b.version_ || a.nodes_.size() != b.nodes_.size()) return false;
  for (const auto& node : a.nodes_) {
    const auto* other = b.find(node.id);
    if (!other || !(*other == node)) return false;
  }
  return true;
}

ContentTree parse_corpus(std::string_view markup) {
  auto doc = xml::parse(markup);
  std::uint64_t version = 1;
  const xml::Element* top = nullptr;
  if (doc.name == "corpus") {
    if (auto v = doc.attribute("version")) version = parse_version(*v);
    for (const auto& child : doc.children) {
      if (child.name != "node") continue;
      if (top) {
        throw Error(ErrorCode::MultipleRoots, "corpus has more than one top-level node ('" +
                                                  top->attribute("id").value_or("") + "', '" +
                                                  child.attribute("id").value_or("") + "')");
      }
      top = &child;
    }
    if (!top) throw Error(ErrorCode::MalformedMarkup, "corpus contains no <node>");
  } else if (doc.name == "node") {
    top = &doc;
  } else {
    throw Error(ErrorCode::MalformedMarkup, "unexpected document element <" + doc.name + ">");
  }

  Builder builder;
  builder.visit(*top, std::nullopt);
  NodeId root = builder.nodes.front().id;
  auto tree = ContentTree::from_nodes(std::move(root), std::move(builder.nodes), version);
  for (const auto& node : tree.nodes()) {
    for (const auto& ref : node.related) {
      if (!tree.find(ref)) {
        throw Error(ErrorCode::DanglingReference, "node '" + node.id + "' references missing id '" + ref + "'");
      }
    }
  }
  return tree;
}

ContentTree load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read corpus file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str());
}

std::string serialize_corpus(const ContentTree& tree) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  xml::Element corpus{"corpus", {{"version", std::to_string(tree.version())}}, {}, {}};
  if (const auto* root = tree.find(tree.root())) corpus.children.push_back(to_element(tree, *root));
  xml::write(corpus, out);
  return out;
}

std::vector<Violation> validate(const ContentTree& tree) {
  std::vector<Violation> out;
  const auto& nodes = tree.nodes();

  std::unordered_map<std::string, int> id_count;
  for (const auto& n : nodes) ++id_count[n.id];
  std::unordered_set<std::string> reported;
  for (const auto& n : nodes) {
    if (id_count[n.id] > 1 && reported.insert(n.id).second) {
      out.push_back({"DuplicateId", n.id, "id used by " + std::to_string(id_count[n.id]) + " nodes"});
    }
  }

  const auto* root = tree.find(tree.root());
  if (!root) {
    out.push_back({"MissingRoot", tree.root(), "root id does not resolve"});
  } else if (root->parent) {
    out.push_back({"RootHasParent", root->id, "root declares parent '" + *root->parent + "'"});
  }

  std::unordered_set<std::string> listed_as_child;
  for (const auto& n : nodes) listed_as_child.insert(n.children.begin(), n.children.end());

  std::vector<std::string> parentless;
  for (const auto& n : nodes) {
    if (!n.parent) {
      if (!listed_as_child.count(n.id)) parentless.push_back(n.id);
    } else if (const auto* p = tree.find(*n.parent); !p) {
      out.push_back({"DanglingReference", n.id, "parent '" + *n.parent + "' does not exist"});
    } else if (std::find(p->children.begin(), p->children.end(), n.id) == p->children.end()) {
      out.push_back({"OrphanedChild", n.id, "parent '" + p->id + "' does not list this node"});
    }
    for (const auto& c : n.children) {
      const auto* child = tree.find(c);
      if (!child) {
        out.push_back({"DanglingReference", n.id, "child '" + c + "' does not exist"});
      } else if (child->parent != n.id) {
        out.push_back({"InconsistentParent", c, "listed as child of '" + n.id + "' but parent field is " +
                                                    (child->parent ? "'" + *child->parent + "'" : "absent")});
      }
    }
    for (const auto& r : n.related) {
      if (!tree.find(r)) out.push_back({"DanglingReference", n.id, "related '" + r + "' does not exist"});
    }
    if (!n.body.empty() && n.keywords.empty()) {
      out.push_back({"MissingKeywords", n.id, "indexable node has no keywords"});
    }
  }
  if (parentless.size() > 1) {
    for (const auto& id : parentless) {
      if (id != tree.root()) out.push_back({"MultipleRoots", id, "node has no parent and is not the root"});
    }
  }

  if (root) {
    std::unordered_set<std::string> visited;
    std::vector<const ContentNode*> stack{root};
    while (!stack.empty()) {
      const auto* n = stack.back();
      stack.pop_back();
      if (!visited.insert(n->id).second) {
        out.push_back({"NotATree", n->id, "node reached more than once from root"});
        continue;
      }
      for (const auto& c : n->children) {
        if (const auto* child = tree.find(c)) stack.push_back(child);
      }
    }
    std::unordered_set<std::string> flagged;
    for (const auto& n : nodes) {
      if (!visited.count(n.id) && flagged.insert(n.id).second) {
        out.push_back({"Unreachable", n.id, "node not reachable from root"});
      }
    }
  }
  return out;
}

}  // namespace opnav
