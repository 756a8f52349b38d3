#include "helpers.hpp"
#include "opnav/config/toml.hpp"
#include "opnav/service/service.hpp"

using namespace opnav;

TEST_SUITE("config") {
  TEST_CASE("toml subset") {
    auto j = config::parse_toml(R"(# top
name = "cnc # not a comment"
path = 'C:\raw\dir'
port = 8080
ratio = -0.5
big = 1_000
on = true
list = [1, 2.5, "x", false]
esc = "tab\there \"q\" \u00e9"

[server]
host = "0.0.0.0"   # trailing comment

[[group]]
name = "a"
[[group]]
name = "b"
)");
    CHECK(j["name"] == "cnc # not a comment");
    CHECK(j["path"] == "C:\\raw\\dir");
    CHECK(j["port"] == 8080);
    CHECK(j["port"].is_number_integer());
    CHECK(j["ratio"] == -0.5);
    CHECK(j["big"] == 1000);
    CHECK(j["on"] == true);
    CHECK(j["list"].size() == 4);
    CHECK(j["list"][1] == 2.5);
    CHECK(j["esc"] == "tab\there \"q\" \xc3\xa9");
    CHECK(j["server"]["host"] == "0.0.0.0");
    REQUIRE(j["group"].size() == 2);
    CHECK(j["group"][1]["name"] == "b");
  }

  TEST_CASE("toml errors carry the line number") {
    const char* bad[] = {
        "a = ",           "a = \"open",        "a.b = 1",         "t = {x = 1}",   "a = 1\na = 2",
        "[t]\n[t]",       "a = [1, 2",         "a = nope",        "= 1",           "a = 1 2",
        "s = \"\"\"x\"\"\"", "[broken",        "e = \"\\q\"",  "u = \"\\uD800\"", "u = \"\\u12\"",
    };
    for (const char* text : bad) {
      CAPTURE(text);
      CHECK_THROWS_CODE(config::parse_toml(text), ErrorCode::ConfigError);
    }
    try {
      config::parse_toml("ok = 1\n\nbad =");
      FAIL("expected ConfigError");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_CODE(config::load_toml("/no/such/file.toml"), ErrorCode::ConfigError);
  }

  TEST_CASE("bundled service config resolves against its directory") {
    auto c = service::load_service_config(testing::data_path("service.toml"));
    CHECK(c.port == 8080);
    CHECK(c.corpus_path == testing::data_path("corpus/cnc_milling.xml"));
    CHECK(c.refinement_threshold == 10);
    CHECK(c.keyword_boost == 3.0);
    CHECK_NOTHROW(service::check_config(c));
  }

  TEST_CASE("config check names the missing path") {
    auto c = service::load_service_config(testing::data_path("service.toml"));
    auto missing_synonyms = c;
    missing_synonyms.synonyms_path = "/nowhere/synonyms.txt";
    try {
      service::check_config(missing_synonyms);
      FAIL("expected ConfigError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
      CHECK(std::string(e.what()).find("/nowhere/synonyms.txt") != std::string::npos);
    }
    auto no_corpus = c;
    no_corpus.corpus_path.clear();
    CHECK_THROWS_CODE(service::check_config(no_corpus), ErrorCode::ConfigError);
    auto bad_port = c;
    bad_port.port = 70000;
    CHECK_THROWS_CODE(service::check_config(bad_port), ErrorCode::ConfigError);
    auto bad_dir = c;
    bad_dir.telemetry_path = "/nowhere/events.jsonl";
    CHECK_THROWS_CODE(service::check_config(bad_dir), ErrorCode::ConfigError);
    CHECK_THROWS_CODE(service::service_config_from_json({{"port", "eighty"}}), ErrorCode::ConfigError);
    CHECK_THROWS_CODE(service::service_config_from_json({{"top_k", 0}}), ErrorCode::ConfigError);
  }
}
