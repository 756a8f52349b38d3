#include "opnav/assistant/assistant.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <set>

#include "opnav/error.hpp"

namespace opnav {

namespace {

std::set<std::string> lowered(const std::set<std::string>& words) {
  std::set<std::string> out;
  for (auto w : words) {
    for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.insert(std::move(w));
  }
  return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& w : a) common += b.count(w);
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

}  // namespace

std::string_view to_string(SuggestionReason reason) {
  switch (reason) {
    case SuggestionReason::explicit_link: return "explicit";
    case SuggestionReason::structure: return "structure";
    case SuggestionReason::keywords: return "keywords";
  }
  return "unknown";
}

std::vector<std::string> expand_query(const std::vector<std::string>& terms, const SynonymTable& synonyms) {
  std::vector<std::string> out;
  auto push = [&](const std::string& t) {
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  };
  for (const auto& t : terms) push(t);
  for (const auto& t : terms) {
    if (const auto* group = synonyms.group_of(t)) {
      for (const auto& mate : *group) push(mate);
    }
  }
  return out;
}

std::vector<RelatedResource> related_resources(const ContentTree& tree, const NodeId& node_id, std::size_t k,
                                               double jaccard_threshold) {
  const auto& node = tree.at(node_id);
  const auto own_keywords = lowered(node.keywords);

  std::map<NodeId, RelatedResource> candidates;
  auto offer = [&](const NodeId& id, SuggestionReason reason) {
    if (id == node_id || !tree.find(id)) return;
    auto [it, inserted] = candidates.try_emplace(id, RelatedResource{id, reason, 0.0});
    if (!inserted && reason < it->second.reason) it->second.reason = reason;
  };

  for (const auto& r : node.related) offer(r, SuggestionReason::explicit_link);
  if (node.parent) {
    offer(*node.parent, SuggestionReason::structure);
    if (const auto* parent = tree.find(*node.parent)) {
      for (const auto& sibling : parent->children) offer(sibling, SuggestionReason::structure);
    }
  }
  for (const auto& c : node.children) offer(c, SuggestionReason::structure);
  for (const auto& other : tree.nodes()) {
    if (other.id == node_id || other.keywords.empty() || own_keywords.empty()) continue;
    if (jaccard(own_keywords, lowered(other.keywords)) >= jaccard_threshold) {
      offer(other.id, SuggestionReason::keywords);
    }
  }

  std::vector<RelatedResource> out;
  out.reserve(candidates.size());
  for (auto& [id, candidate] : candidates) {
    candidate.jaccard = jaccard(own_keywords, lowered(tree.at(id).keywords));
    out.push_back(candidate);
  }
  std::sort(out.begin(), out.end(), [](const RelatedResource& a, const RelatedResource& b) {
    if (a.reason != b.reason) return a.reason < b.reason;
    if (a.jaccard != b.jaccard) return a.jaccard > b.jaccard;
    return a.node_id < b.node_id;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

std::string utf8_prefix(const std::string& text, std::size_t max_chars) {
  std::size_t chars = 0, i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    // Continuation bytes belong to the preceding code point.
    if ((c & 0xC0) != 0x80) {
      if (chars == max_chars) break;
      ++chars;
    }
    ++i;
  }
  return text.substr(0, i);
}

std::pair<Answer, SessionState> answer_question(SessionState session, const std::string& question,
                                                const KnowledgeBase& kb, const AssistantConfig& config,
                                                std::int64_t now_ms) {
  if (session.phase == SessionPhase::Ended) {
    throw Error(ErrorCode::SessionEnded, "session '" + session.session_id + "' has ended");
  }
  if (blank(question)) throw Error(ErrorCode::EmptyQuestion, "question is empty");

  const std::string session_id = session.session_id;
  auto event = [&](EventKind kind, std::string payload) {
    return InteractionEvent{now_ms, session_id, kind, std::move(payload)};
  };
  // A follow-up question while an answer is on screen goes through the
  // manual-search path; the table has no AnswerDelivered + AskQuestion edge.
  switch (session.phase) {
    case SessionPhase::AnswerDelivered:
      session = transition(std::move(session), event(EventKind::TypeKeywords, question));
      break;
    case SessionPhase::ManualSearch: break;
    default: session = transition(std::move(session), event(EventKind::AskQuestion, question)); break;
  }

  Answer answer;
  auto terms = expand_query(kb.tokenizer(question), kb.synonyms);
  std::vector<SearchHit> hits;
  if (!terms.empty()) hits = search(kb.index, terms, std::numeric_limits<std::size_t>::max(), config.bm25);

  if (hits.empty()) {
    answer.refinement = RefinementSuggestion{
        "No resources match your question. Try wording it differently or typing other keywords.", {}};
  } else {
    const auto& primary = kb.tree.at(hits.front().node_id);
    answer.primary_node = primary.id;
    answer.snippet = utf8_prefix(primary.body, config.snippet_length);
    for (std::size_t i = 1; i < hits.size() && answer.alternates.size() < config.max_alternates; ++i) {
      answer.alternates.push_back(hits[i]);
    }
    answer.suggestions = related_resources(kb.tree, primary.id, config.max_suggestions, config.jaccard_threshold);
    answer.refinement = suggest_refinement(hits, kb.index, config.refinement_threshold);
  }

  session = transition(std::move(session), event(EventKind::AnswerReady, answer.primary_node.value_or("")));
  return {std::move(answer), std::move(session)};
}

}  // namespace opnav
