#pragma once

#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "opnav/assistant/session.hpp"
#include "opnav/knowledge/corpus.hpp"

namespace opnav {

std::string event_to_json_line(const InteractionEvent& event);
InteractionEvent event_from_json_line(const std::string& line);  // throws Error(InvalidEvent)

/// Append-only interaction log, optionally backed by a JSON-lines file.
/// Appends are serialized; timestamps must not decrease within a session.
class TelemetryLog {
 public:
  /// In-memory log.
  TelemetryLog();
  /// File-backed log. Existing lines are replayed so per-session timestamp
  /// ordering carries over restarts. Throws Error(StorageFailure).
  explicit TelemetryLog(const std::string& path);
  ~TelemetryLog();

  TelemetryLog(const TelemetryLog&) = delete;
  TelemetryLog& operator=(const TelemetryLog&) = delete;

  /// Throws Error(InvalidTimestamp), Error(InvalidEvent) or Error(StorageFailure).
  void record(const InteractionEvent& event);

  std::vector<InteractionEvent> events() const;
  std::size_t size() const;

 private:
  void validate_locked(const InteractionEvent& event) const;

  mutable std::mutex mutex_;
  std::vector<InteractionEvent> events_;
  std::unordered_map<std::string, std::int64_t> last_ts_;
  std::FILE* file_ = nullptr;
  std::string path_;
};

struct UsageReport {
  std::map<NodeId, std::size_t> node_query_counts;            // AnswerReady resolutions per node
  std::map<std::string, std::size_t> session_question_counts;  // AskQuestion + TypeKeywords per session
  std::vector<std::pair<NodeId, std::size_t>> top_procedures;  // operation/maintenance/safety nodes

  bool operator==(const UsageReport&) const = default;
};

UsageReport usage_summary(const std::vector<InteractionEvent>& events, const ContentTree& tree);

}  // namespace opnav
