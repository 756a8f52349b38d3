#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opnav/assistant/session.hpp"
#include "opnav/knowledge/corpus.hpp"
#include "opnav/knowledge/synonyms.hpp"
#include "opnav/search/index.hpp"
#include "opnav/search/tokenizer.hpp"

namespace opnav {

enum class SuggestionReason { explicit_link, structure, keywords };

std::string_view to_string(SuggestionReason reason);

struct RelatedResource {
  NodeId node_id;
  SuggestionReason reason = SuggestionReason::structure;
  double jaccard = 0.0;

  bool operator==(const RelatedResource&) const = default;
};

struct AssistantConfig {
  std::size_t refinement_threshold = kDefaultRefinementThreshold;
  std::size_t max_alternates = 5;
  std::size_t max_suggestions = 5;
  double jaccard_threshold = 0.25;
  std::size_t snippet_length = 400;  // in characters (UTF-8 code points)
  Bm25Params bm25;
};

/// Read-only view of everything the question pipeline needs.
struct KnowledgeBase {
  const ContentTree& tree;
  const SearchIndex& index;
  const SynonymTable& synonyms;
  const Tokenizer& tokenizer;
};

struct Answer {
  std::optional<NodeId> primary_node;
  std::string snippet;
  std::vector<SearchHit> alternates;
  std::vector<RelatedResource> suggestions;
  std::optional<RefinementSuggestion> refinement;

  bool operator==(const Answer&) const = default;
};

/// Input terms first, then group-mates of each term in encounter order, with
/// duplicates removed.
std::vector<std::string> expand_query(const std::vector<std::string>& terms, const SynonymTable& synonyms);

/// Proactive suggestions for `node`: explicit links, then parent/children/
/// siblings, then nodes whose keyword Jaccard similarity reaches the
/// threshold. Throws Error(UnknownNode).
std::vector<RelatedResource> related_resources(const ContentTree& tree, const NodeId& node, std::size_t k,
                                               double jaccard_threshold = 0.25);

/// Leading `max_chars` UTF-8 code points of `text`.
std::string utf8_prefix(const std::string& text, std::size_t max_chars);

/// Runs tokenize -> expand -> search -> suggest and advances the session to
/// AnswerDelivered. Both events carry `now_ms`.
/// Throws Error(SessionEnded), Error(EmptyQuestion) or Error(IllegalTransition)
/// when a question is already pending.
std::pair<Answer, SessionState> answer_question(SessionState session, const std::string& question,
                                                const KnowledgeBase& kb, const AssistantConfig& config,
                                                std::int64_t now_ms);

}  // namespace opnav
