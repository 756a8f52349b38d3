#include "opnav/assistant/telemetry.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "opnav/error.hpp"

#include <unistd.h>

namespace opnav {

std::string event_to_json_line(const InteractionEvent& event) {
  nlohmann::ordered_json j;
  j["ts"] = event.timestamp_ms;
  j["session"] = event.session_id;
  j["kind"] = std::string(to_string(event.kind));
  j["payload"] = event.payload;
  return j.dump();
}

InteractionEvent event_from_json_line(const std::string& line) {
  try {
    auto j = nlohmann::json::parse(line);
    InteractionEvent e;
    e.timestamp_ms = j.at("ts").get<std::int64_t>();
    e.session_id = j.at("session").get<std::string>();
    auto kind = parse_event_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::InvalidEvent, "unknown event kind in telemetry line");
    e.kind = *kind;
    e.payload = j.value("payload", std::string());
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::InvalidEvent, std::string("bad telemetry line: ") + ex.what());
  }
}

TelemetryLog::TelemetryLog() = default;

TelemetryLog::TelemetryLog(const std::string& path) : path_(path) {
  {
    std::ifstream in(path);
    std::string line;
    std::size_t line_no = 0;
    while (in && std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        auto event = event_from_json_line(line);
        validate_locked(event);
        last_ts_[event.session_id] = event.timestamp_ms;
        events_.push_back(std::move(event));
      } catch (const Error& ex) {
        throw Error(ErrorCode::StorageFailure,
                    "telemetry log '" + path + "' line " + std::to_string(line_no) + ": " + ex.what());
      }
    }
  }
  file_ = std::fopen(path.c_str(), "a");
  if (!file_) throw Error(ErrorCode::StorageFailure, "cannot open telemetry log '" + path + "' for append");
}

TelemetryLog::~TelemetryLog() {
  if (file_) std::fclose(file_);
}

void TelemetryLog::validate_locked(const InteractionEvent& event) const {
  if (event.session_id.empty()) throw Error(ErrorCode::InvalidEvent, "event without session id");
  check_payload(event);
  auto it = last_ts_.find(event.session_id);
  if (it != last_ts_.end() && event.timestamp_ms < it->second) {
    throw Error(ErrorCode::InvalidTimestamp, "timestamp " + std::to_string(event.timestamp_ms) +
                                                 " precedes " + std::to_string(it->second) + " in session '" +
                                                 event.session_id + "'");
  }
}

void TelemetryLog::record(const InteractionEvent& event) {
  std::lock_guard lock(mutex_);
  validate_locked(event);
  if (file_) {
    auto line = event_to_json_line(event) + "\n";
    if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0 ||
        ::fsync(::fileno(file_)) != 0) {
      throw Error(ErrorCode::StorageFailure, "failed to append to telemetry log '" + path_ + "'");
    }
  }
  last_ts_[event.session_id] = event.timestamp_ms;
  events_.push_back(event);
}

std::vector<InteractionEvent> TelemetryLog::events() const {
  std::lock_guard lock(mutex_);
  return events_;
}

std::size_t TelemetryLog::size() const {
  std::lock_guard lock(mutex_);
  return events_.size();
}

UsageReport usage_summary(const std::vector<InteractionEvent>& events, const ContentTree& tree) {
  UsageReport report;
  for (const auto& e : events) {
    switch (e.kind) {
      case EventKind::AskQuestion:
      case EventKind::TypeKeywords: ++report.session_question_counts[e.session_id]; break;
      case EventKind::AnswerReady:
        if (!e.payload.empty()) ++report.node_query_counts[e.payload];
        break;
      default: break;
    }
  }
  for (const auto& [id, count] : report.node_query_counts) {
    const auto* node = tree.find(id);
    if (!node) continue;
    if (node->node_type == NodeType::operation || node->node_type == NodeType::maintenance ||
        node->node_type == NodeType::safety) {
      report.top_procedures.emplace_back(id, count);
    }
  }
  std::stable_sort(report.top_procedures.begin(), report.top_procedures.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return report;
}

}  // namespace opnav
