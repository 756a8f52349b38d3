#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opnav/knowledge/corpus.hpp"

namespace opnav {

enum class SessionPhase { Idle, QuestionPending, AnswerDelivered, ContentViewing, ManualSearch, Ended };

enum class EventKind { AskQuestion, AnswerReady, OpenContent, FollowSuggestion, TypeKeywords, Back, EndSession };

inline constexpr std::array<SessionPhase, 6> kAllPhases{
    SessionPhase::Idle,           SessionPhase::QuestionPending, SessionPhase::AnswerDelivered,
    SessionPhase::ContentViewing, SessionPhase::ManualSearch,    SessionPhase::Ended};

inline constexpr std::array<EventKind, 7> kAllEventKinds{
    EventKind::AskQuestion,  EventKind::AnswerReady, EventKind::OpenContent, EventKind::FollowSuggestion,
    EventKind::TypeKeywords, EventKind::Back,        EventKind::EndSession};

std::string_view to_string(SessionPhase phase);
std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

struct InteractionEvent {
  std::int64_t timestamp_ms = 0;
  std::string session_id;
  EventKind kind = EventKind::AskQuestion;
  // Question text, typed keywords, or a node id depending on kind. Empty for
  // Back/EndSession, and for AnswerReady when nothing matched.
  std::string payload;

  bool operator==(const InteractionEvent&) const = default;
};

/// Throws Error(InvalidEvent) when a kind-specific payload is missing.
void check_payload(const InteractionEvent& event);

struct SessionState {
  std::string session_id;
  SessionPhase phase = SessionPhase::Idle;
  std::optional<NodeId> current_node;
  std::vector<InteractionEvent> history;

  bool operator==(const SessionState&) const = default;
};

/// Target phase for (phase, event) according to the transition table, or
/// nullopt when the pair is not in the table.
std::optional<SessionPhase> next_phase(SessionPhase phase, EventKind kind);

/// Applies the event and appends it to the history. Throws
/// Error(IllegalTransition) for pairs outside the table.
SessionState transition(SessionState state, const InteractionEvent& event);

}  // namespace opnav
