#include <random>

#include "helpers.hpp"
#include "opnav/knowledge/synonyms.hpp"
#include "opnav/knowledge/xml.hpp"

using namespace opnav;

TEST_SUITE("knowledge") {
  TEST_CASE("xml parser handles entities, cdata, comments and reports positions") {
    auto el = xml::parse(
        "<?xml version=\"1.0\"?>\n<!-- c --><a k=\"1 &amp; 2\"><b>x &lt; y &#65;&#x42;</b><![CDATA[<raw>]]></a>");
    CHECK(el.name == "a");
    CHECK(el.attribute("k") == "1 & 2");
    REQUIRE(el.children.size() == 1);
    CHECK(el.children[0].text == "x < y AB");
    CHECK(el.text == "<raw>");

    try {
      xml::parse("<a>\n  <b></c>\n</a>");
      FAIL("expected MalformedMarkup");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MalformedMarkup);
      CHECK(std::string(e.what()).rfind("2:", 0) == 0);
    }
    CHECK_THROWS_CODE(xml::parse(""), ErrorCode::MalformedMarkup);
    CHECK_THROWS_CODE(xml::parse("<a></a><b/>"), ErrorCode::MalformedMarkup);
    CHECK_THROWS_CODE(xml::parse("<a x='1' x='2'/>"), ErrorCode::MalformedMarkup);
    CHECK_THROWS_CODE(xml::parse("<a>&bogus;</a>"), ErrorCode::MalformedMarkup);
  }

  TEST_CASE("minimal corpus is a single bare node") {
    auto tree = parse_corpus("<node id=\"root\" title=\"CNC\"/>");
    CHECK(tree.size() == 1);
    CHECK(tree.root() == "root");
    CHECK(tree.at("root").title == "CNC");
    CHECK(validate(tree).empty());
  }

  TEST_CASE("parse errors") {
    CHECK_THROWS_CODE(parse_corpus("<node id=\"a\"><node id=\"a\"/></node>"), ErrorCode::DuplicateId);
    CHECK_THROWS_CODE(parse_corpus("<corpus><node id=\"a\"/><node id=\"b\"/></corpus>"), ErrorCode::MultipleRoots);
    CHECK_THROWS_CODE(parse_corpus("<node id=\"a\" type=\"spaceship\"/>"), ErrorCode::MalformedMarkup);
    CHECK_THROWS_CODE(parse_corpus("<node title=\"no id\"/>"), ErrorCode::MalformedMarkup);
    CHECK_THROWS_CODE(parse_corpus("<node id=\"a\"><body>open</node>"), ErrorCode::MalformedMarkup);
    try {
      parse_corpus("<node id=\"a\"><related ref=\"x9\"/></node>");
      FAIL("expected DanglingReference");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DanglingReference);
      CHECK(std::string(e.what()).find("x9") != std::string::npos);
    }
  }

  TEST_CASE("children keep document order and parents are set") {
    auto tree = parse_corpus(
        "<corpus version=\"7\"><node id=\"r\"><node id=\"c\"/><node id=\"a\"/><node id=\"b\"/></node></corpus>");
    CHECK(tree.version() == 7);
    CHECK(tree.at("r").children == std::vector<NodeId>{"c", "a", "b"});
    CHECK(tree.at("a").parent == "r");
    CHECK_THROWS_CODE(tree.at("zz"), ErrorCode::UnknownNode);
  }

  TEST_CASE("bundled corpus is valid, deep and round-trips") {
    auto tree = load_corpus(testing::data_path("corpus/cnc_milling.xml"));
    CHECK(tree.size() >= 30);
    CHECK(tree.depth() >= 3);
    CHECK(validate(tree).empty());
    for (const char* id : {"safety", "operations", "maintenance", "mnt-chuck-pressure"}) CHECK(tree.find(id));
    auto text = serialize_corpus(tree);
    CHECK(parse_corpus(text) == tree);
    CHECK(serialize_corpus(parse_corpus(text)) == text);
  }

  TEST_CASE("unicode titles survive byte-exactly") {
    auto tree = testing::flat_tree({testing::make_node("a", "ulei", {"ulei"})});
    auto nodes = tree.nodes();
    nodes[1].title = "lubrifica ție";
    auto t = ContentTree::from_nodes("root", nodes);
    CHECK(parse_corpus(serialize_corpus(t)).at("a").title == "lubrifica ție");
  }

  TEST_CASE("500 randomized trees round-trip") {
    std::mt19937_64 rng(12345);
    for (int i = 0; i < 500; ++i) {
      auto tree = testing::random_tree(rng);
      auto text = serialize_corpus(tree);
      auto back = parse_corpus(text);
      REQUIRE_MESSAGE(back == tree, text);
    }
  }

  TEST_CASE("unknown elements and attributes are preserved") {
    const char* doc = "<node id=\"a\" owner=\"line 3\"><note lang=\"en\">keep me</note><kw>k</kw></node>";
    auto tree = parse_corpus(doc);
    CHECK(tree.at("a").extra_attributes.size() == 1);
    CHECK(tree.at("a").extensions.size() == 1);
    CHECK(parse_corpus(serialize_corpus(tree)) == tree);
  }

  TEST_CASE("validate reports each broken invariant") {
    using V = std::vector<std::string>;
    auto rules = [](const ContentTree& t) {
      V out;
      for (const auto& v : validate(t)) out.push_back(v.rule);
      return out;
    };

    // parent lists the child but the child's parent field is absent
    auto r = testing::make_node("r", "");
    r.children = {"c"};
    auto c = testing::make_node("c", "");
    CHECK(rules(ContentTree::from_nodes("r", {r, c})) == V{"InconsistentParent"});

    auto m1 = testing::make_node("m1", "");
    auto m1b = testing::make_node("m1", "");
    auto dup = validate(ContentTree::from_nodes("m1", {m1, m1b}));
    REQUIRE(!dup.empty());
    CHECK(dup.front().rule == "DuplicateId");
    CHECK(dup.front().node_id == "m1");

    auto x = testing::make_node("x", "");
    x.children = {"x9"};
    CHECK(rules(ContentTree::from_nodes("x", {x})) == V{"DanglingReference"});

    auto body_only = testing::flat_tree({testing::make_node("b", "text without keywords")});
    CHECK(rules(body_only) == V{"MissingKeywords"});

    auto lone = testing::make_node("lone", "");
    auto root = testing::make_node("root", "");
    CHECK(rules(ContentTree::from_nodes("root", {root, lone})) == V{"MultipleRoots", "Unreachable"});

    CHECK(rules(ContentTree::from_nodes("nope", {root})) == V{"MissingRoot"});

    // a -> b -> a cycle hanging off the root
    auto ra = testing::make_node("root", "");
    ra.children = {"a"};
    auto a = testing::make_node("a", "");
    a.parent = "root";
    a.children = {"b"};
    auto b = testing::make_node("b", "");
    b.parent = "a";
    b.children = {"a"};
    auto cyc = rules(ContentTree::from_nodes("root", {ra, a, b}));
    CHECK(std::find(cyc.begin(), cyc.end(), "NotATree") != cyc.end());
  }

  TEST_CASE("validate is total on random damage") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 300; ++i) {
      auto nodes = testing::random_tree(rng).nodes();
      auto& victim = nodes[rng() % nodes.size()];
      switch (rng() % 4) {
        case 0: victim.children.push_back("ghost"); break;
        case 1: victim.parent.reset(); break;
        case 2: victim.related.push_back("ghost"); break;
        default: victim.id = nodes.front().id; break;
      }
      auto tree = ContentTree::from_nodes(nodes.front().id, nodes);
      CHECK_NOTHROW(validate(tree));
    }
  }

  TEST_CASE("valid trees satisfy the edge count property") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
      auto tree = testing::random_tree(rng);
      std::size_t edges = 0;
      for (const auto& n : tree.nodes()) edges += n.children.size();
      CHECK(edges == tree.size() - 1);
      for (const auto& v : validate(tree)) CHECK(v.rule == "MissingKeywords");
    }
  }

  TEST_CASE("next_version increments") {
    auto tree = parse_corpus("<node id=\"r\"/>");
    CHECK(tree.next_version().version() == tree.version() + 1);
    CHECK(!(tree.next_version() == tree));
  }

  TEST_CASE("synonym table") {
    auto table = parse_synonyms("# comment\nLube, lubricant , grease\n\ncoolant, cooling # trailing\n");
    REQUIRE(table.groups().size() == 2);
    REQUIRE(table.group_of("lube"));
    CHECK(*table.group_of("lube") == std::vector<std::string>{"lube", "lubricant", "grease"});
    CHECK(table.group_of("grease") == table.group_of("lube"));
    CHECK(table.group_of("spindle") == nullptr);
    CHECK_THROWS_CODE(SynonymTable({{"a", "b"}, {"b", "c"}}), ErrorCode::InvalidArgument);
    CHECK(load_synonyms(testing::data_path("synonyms.txt")).group_of("lube"));
  }
}
