#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "opnav/knowledge/corpus.hpp"
#include "opnav/search/tokenizer.hpp"

namespace opnav {

struct Posting {
  NodeId node_id;
  double term_frequency = 0.0;  // keyword occurrences contribute `keyword_boost` each

  bool operator==(const Posting&) const = default;
};

/// Immutable inverted index over the indexable nodes of a ContentTree.
/// Body and keyword tokens are indexed; titles are not.
struct SearchIndex {
  std::map<std::string, std::vector<Posting>> postings;  // each list sorted by node id
  std::map<NodeId, std::size_t> doc_stats;               // raw token count per node
  std::map<NodeId, std::vector<std::string>> doc_terms;  // distinct terms per node, sorted
  std::size_t doc_count = 0;
  double avg_doc_len = 0.0;
  double keyword_boost = 3.0;
  std::uint64_t corpus_version = 0;

  bool operator==(const SearchIndex&) const = default;
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct SearchHit {
  NodeId node_id;
  double score = 0.0;
  std::set<std::string> matched_terms;

  bool operator==(const SearchHit&) const = default;
};

struct RefinementSuggestion {
  std::string message;
  std::vector<std::string> discriminating_terms;

  bool operator==(const RefinementSuggestion&) const = default;
};

inline constexpr double kDefaultKeywordBoost = 3.0;
inline constexpr std::size_t kDefaultRefinementThreshold = 10;
inline constexpr std::size_t kMaxDiscriminatingTerms = 5;

/// Requires boost >= 1 (Error(InvalidArgument) otherwise).
SearchIndex build_index(const ContentTree& tree, double boost = kDefaultKeywordBoost,
                        const Tokenizer& tokenizer = Tokenizer());

/// Okapi BM25 ranking. Query terms are lower-cased and de-duplicated;
/// throws Error(EmptyQuery) when nothing remains. Results are sorted by score
/// descending, node id ascending, and truncated to k.
std::vector<SearchHit> search(const SearchIndex& index, const std::vector<std::string>& terms,
                              std::size_t k, const Bm25Params& params = {});

/// Proposes terms that split an over-broad hit set when |hits| > threshold.
std::optional<RefinementSuggestion> suggest_refinement(const std::vector<SearchHit>& hits,
                                                       const SearchIndex& index,
                                                       std::size_t threshold = kDefaultRefinementThreshold);

/// Versioned binary cache. load_index_cache returns nullopt when the file is
/// missing, unreadable, of another format version, or built from a corpus
/// version other than `expected_corpus_version`.
void save_index_cache(const SearchIndex& index, const std::string& path);
std::optional<SearchIndex> load_index_cache(const std::string& path, std::uint64_t expected_corpus_version);

}  // namespace opnav
