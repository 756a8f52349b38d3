#include "opnav/assistant/session.hpp"

#include "opnav/error.hpp"

namespace opnav {

std::string_view to_string(SessionPhase phase) {
  switch (phase) {
    case SessionPhase::Idle: return "Idle";
    case SessionPhase::QuestionPending: return "QuestionPending";
    case SessionPhase::AnswerDelivered: return "AnswerDelivered";
    case SessionPhase::ContentViewing: return "ContentViewing";
    case SessionPhase::ManualSearch: return "ManualSearch";
    case SessionPhase::Ended: return "Ended";
  }
  return "Unknown";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::AskQuestion: return "AskQuestion";
    case EventKind::AnswerReady: return "AnswerReady";
    case EventKind::OpenContent: return "OpenContent";
    case EventKind::FollowSuggestion: return "FollowSuggestion";
    case EventKind::TypeKeywords: return "TypeKeywords";
    case EventKind::Back: return "Back";
    case EventKind::EndSession: return "EndSession";
  }
  return "Unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (auto kind : kAllEventKinds) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

void check_payload(const InteractionEvent& event) {
  switch (event.kind) {
    case EventKind::AskQuestion:
    case EventKind::TypeKeywords:
    case EventKind::OpenContent:
    case EventKind::FollowSuggestion:
      if (event.payload.empty()) {
        throw Error(ErrorCode::InvalidEvent, std::string(to_string(event.kind)) + " requires a payload");
      }
      break;
    case EventKind::AnswerReady:
    case EventKind::Back:
    case EventKind::EndSession:
      break;
  }
}

std::optional<SessionPhase> next_phase(SessionPhase phase, EventKind kind) {
  using P = SessionPhase;
  using E = EventKind;
  if (kind == E::EndSession) return P::Ended;
  switch (phase) {
    case P::Idle:
      if (kind == E::AskQuestion) return P::QuestionPending;
      break;
    case P::QuestionPending:
      if (kind == E::AnswerReady) return P::AnswerDelivered;
      break;
    case P::AnswerDelivered:
      if (kind == E::OpenContent || kind == E::FollowSuggestion) return P::ContentViewing;
      if (kind == E::TypeKeywords) return P::ManualSearch;
      break;
    case P::ContentViewing:
      if (kind == E::Back) return P::AnswerDelivered;
      if (kind == E::AskQuestion) return P::QuestionPending;
      break;
    case P::ManualSearch:
      if (kind == E::AnswerReady) return P::AnswerDelivered;
      break;
    case P::Ended:
      break;
  }
  return std::nullopt;
}

SessionState transition(SessionState state, const InteractionEvent& event) {
  auto next = next_phase(state.phase, event.kind);
  if (!next) {
    throw Error(ErrorCode::IllegalTransition, "illegal transition: " + std::string(to_string(event.kind)) +
                                                  " in state " + std::string(to_string(state.phase)));
  }
  state.phase = *next;
  switch (event.kind) {
    case EventKind::OpenContent:
    case EventKind::FollowSuggestion: state.current_node = event.payload; break;
    case EventKind::Back:
    case EventKind::AskQuestion:
    case EventKind::TypeKeywords: state.current_node.reset(); break;
    default: break;
  }
  state.history.push_back(event);
  return state;
}

}  // namespace opnav
