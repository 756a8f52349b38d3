#include <map>
#include <random>
#include <thread>

#include "helpers.hpp"
#include "opnav/assistant/telemetry.hpp"

using namespace opnav;

namespace {

ContentTree usage_tree() {
  auto m = testing::make_node("m", "b", {"k"});
  m.node_type = NodeType::maintenance;
  auto s = testing::make_node("s", "b", {"k"});
  s.node_type = NodeType::safety;
  auto h = testing::make_node("h", "b", {"k"});
  h.node_type = NodeType::hazard;
  return testing::flat_tree({m, s, h});
}

}  // namespace

TEST_SUITE("telemetry") {
  TEST_CASE("appends keep order") {
    TelemetryLog log;
    log.record({1, "s", EventKind::AskQuestion, "q"});
    log.record({2, "s", EventKind::AnswerReady, "m"});
    auto events = log.events();
    REQUIRE(events.size() == 2);
    CHECK(events[0].kind == EventKind::AskQuestion);
    CHECK(events[1].kind == EventKind::AnswerReady);
  }

  TEST_CASE("timestamps may not go back within a session") {
    TelemetryLog log;
    log.record({10, "a", EventKind::AskQuestion, "q"});
    CHECK_THROWS_CODE(log.record({9, "a", EventKind::AnswerReady, ""}), ErrorCode::InvalidTimestamp);
    CHECK_NOTHROW(log.record({5, "b", EventKind::AskQuestion, "q"}));  // other sessions are independent
    CHECK_NOTHROW(log.record({10, "a", EventKind::AnswerReady, ""}));  // equal is fine
    CHECK_THROWS_CODE(log.record({11, "", EventKind::AskQuestion, "q"}), ErrorCode::InvalidEvent);
    CHECK(log.size() == 3);
  }

  TEST_CASE("json lines round-trip, including awkward payloads") {
    InteractionEvent e{123456789012, "sess \"1\"", EventKind::TypeKeywords, "ulei\nși \\ grăsime"};
    CHECK(event_from_json_line(event_to_json_line(e)) == e);
    CHECK(event_to_json_line(e).find('\n') == std::string::npos);
    CHECK_THROWS_CODE(event_from_json_line("{\"ts\":1}"), ErrorCode::InvalidEvent);
    CHECK_THROWS_CODE(event_from_json_line("not json"), ErrorCode::InvalidEvent);
  }

  TEST_CASE("replay of 1000 synthetic events matches the generator's tallies") {
    auto dir = testing::temp_dir("telemetry_replay");
    auto path = (dir / "events.jsonl").string();
    auto tree = usage_tree();
    std::mt19937_64 rng(77);
    const std::vector<std::string> targets{"m", "s", "h", ""};
    std::map<std::string, std::size_t> node_counts, session_counts;
    std::vector<InteractionEvent> written;
    {
      TelemetryLog log(path);
      std::map<std::string, std::int64_t> clock;
      for (int i = 0; i < 1000; ++i) {
        std::string session = "s" + std::to_string(rng() % 9);
        auto ts = clock[session] += static_cast<std::int64_t>(rng() % 3);
        InteractionEvent e{ts, session, EventKind::AskQuestion, "q"};
        switch (rng() % 4) {
          case 0: e.kind = EventKind::AskQuestion; ++session_counts[session]; break;
          case 1: e.kind = EventKind::TypeKeywords; ++session_counts[session]; break;
          case 2:
            e.kind = EventKind::AnswerReady;
            e.payload = targets[rng() % targets.size()];
            if (!e.payload.empty()) ++node_counts[e.payload];
            break;
          default: e.kind = EventKind::Back; e.payload.clear(); break;
        }
        log.record(e);
        written.push_back(e);
      }
    }
    TelemetryLog reopened(path);
    CHECK(reopened.events() == written);
    auto report = usage_summary(reopened.events(), tree);
    CHECK(report.node_query_counts == std::map<NodeId, std::size_t>(node_counts.begin(), node_counts.end()));
    CHECK(report.session_question_counts == session_counts);
    // hazard nodes are not procedures
    for (const auto& [id, n] : report.top_procedures) CHECK(id != "h");

    // ordering carries over the restart
    CHECK_THROWS_CODE(reopened.record({-1, "s0", EventKind::Back, ""}), ErrorCode::InvalidTimestamp);
  }

  TEST_CASE("usage report examples") {
    auto tree = usage_tree();
    CHECK(usage_summary({}, tree) == UsageReport{});
    std::vector<InteractionEvent> events{
        {1, "a", EventKind::AnswerReady, "m"}, {2, "a", EventKind::AnswerReady, "s"},
        {3, "b", EventKind::AnswerReady, "m"}, {4, "b", EventKind::AnswerReady, "m"},
    };
    auto report = usage_summary(events, tree);
    using Top = std::vector<std::pair<NodeId, std::size_t>>;
    CHECK(report.top_procedures == Top{{"m", 3}, {"s", 1}});
  }

  TEST_CASE("corrupt log is a storage failure") {
    auto dir = testing::temp_dir("telemetry_corrupt");
    auto path = dir / "events.jsonl";
    std::ofstream(path) << "{\"ts\":1,\"session\":\"a\",\"kind\":\"AskQuestion\",\"payload\":\"q\"}\ngarbage\n";
    CHECK_THROWS_CODE(TelemetryLog(path.string()), ErrorCode::StorageFailure);
    CHECK_THROWS_CODE(TelemetryLog((dir / "no" / "such" / "dir.jsonl").string()), ErrorCode::StorageFailure);
  }

  TEST_CASE("concurrent appends are serialized") {
    auto dir = testing::temp_dir("telemetry_threads");
    auto path = (dir / "events.jsonl").string();
    {
      TelemetryLog log(path);
      std::vector<std::thread> threads;
      for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&, t] {
          for (int i = 0; i < 100; ++i) log.record({i, "t" + std::to_string(t), EventKind::AskQuestion, "q"});
        });
      }
      for (auto& th : threads) th.join();
      CHECK(log.size() == 800);
    }
    TelemetryLog reopened(path);
    CHECK(reopened.size() == 800);
  }
}
