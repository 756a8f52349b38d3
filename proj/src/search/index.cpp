#include "opnav/search/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <unordered_map>

#include "opnav/error.hpp"

namespace opnav {

SearchIndex build_index(const ContentTree& tree, double boost, const Tokenizer& tokenizer) {
  if (!(boost >= 1.0)) throw Error(ErrorCode::InvalidArgument, "keyword boost must be >= 1");
  SearchIndex index;
  index.keyword_boost = boost;
  index.corpus_version = tree.version();

  // node id -> term -> frequency; std::map keeps the postings sorted by node id.
  std::map<NodeId, std::map<std::string, double>> per_doc;
  for (const auto& node : tree.nodes()) {
    if (node.body.empty() && node.keywords.empty()) continue;
    if (index.doc_stats.count(node.id)) continue;
    auto& freqs = per_doc[node.id];
    std::size_t length = 0;
    for (auto& token : tokenizer(node.body)) {
      freqs[token] += 1.0;
      ++length;
    }
    for (const auto& kw : node.keywords) {
      for (auto& token : tokenizer(kw)) {
        freqs[token] += boost;
        ++length;
      }
    }
    index.doc_stats[node.id] = length;
  }

  for (auto& [id, freqs] : per_doc) {
    auto& terms = index.doc_terms[id];
    for (auto& [term, tf] : freqs) {
      index.postings[term].push_back({id, tf});
      terms.push_back(term);
    }
  }
  index.doc_count = index.doc_stats.size();
  if (index.doc_count > 0) {
    double total = 0.0;
    for (const auto& [id, len] : index.doc_stats) total += static_cast<double>(len);
    index.avg_doc_len = total / static_cast<double>(index.doc_count);
  }
  return index;
}

std::vector<SearchHit> search(const SearchIndex& index, const std::vector<std::string>& terms, std::size_t k,
                              const Bm25Params& params) {
  std::vector<std::string> query;
  for (const auto& raw : terms) {
    std::string term = raw;
    for (auto& c : term) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    if (!term.empty() && std::find(query.begin(), query.end(), term) == query.end()) query.push_back(term);
  }
  if (query.empty()) throw Error(ErrorCode::EmptyQuery, "query has no terms");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");

  const double n_docs = static_cast<double>(index.doc_count);
  std::map<NodeId, SearchHit> accum;
  for (const auto& term : query) {
    auto it = index.postings.find(term);
    if (it == index.postings.end()) continue;
    const double df = static_cast<double>(it->second.size());
    const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
    for (const auto& posting : it->second) {
      const double len = static_cast<double>(index.doc_stats.at(posting.node_id));
      const double norm = index.avg_doc_len > 0.0 ? len / index.avg_doc_len : 1.0;
      const double tf = posting.term_frequency;
      const double weight = idf * tf * (params.k1 + 1.0) / (tf + params.k1 * (1.0 - params.b + params.b * norm));
      auto& hit = accum[posting.node_id];
      hit.node_id = posting.node_id;
      hit.score += weight;
      hit.matched_terms.insert(term);
    }
  }

  std::vector<SearchHit> hits;
  hits.reserve(accum.size());
  for (auto& [id, hit] : accum) {
    if (hit.score > 0.0) hits.push_back(std::move(hit));
  }
  std::stable_sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.node_id < b.node_id;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

std::optional<RefinementSuggestion> suggest_refinement(const std::vector<SearchHit>& hits, const SearchIndex& index,
                                                       std::size_t threshold) {
  if (threshold == 0) throw Error(ErrorCode::InvalidArgument, "refinement threshold must be >= 1");
  if (hits.size() <= threshold) return std::nullopt;

  const auto n_hits = static_cast<long>(hits.size());
  const auto max_df = (n_hits + 1) / 2;
  std::set<std::string> query_terms;
  std::map<std::string, long> hit_df;
  for (const auto& hit : hits) {
    query_terms.insert(hit.matched_terms.begin(), hit.matched_terms.end());
    auto it = index.doc_terms.find(hit.node_id);
    if (it == index.doc_terms.end()) continue;
    for (const auto& term : it->second) ++hit_df[term];
  }

  std::vector<std::pair<long, std::string>> ranked;  // (distance from an even split, term)
  for (const auto& [term, df] : hit_df) {
    if (query_terms.count(term) || df < 1 || df > max_df) continue;
    ranked.emplace_back(std::labs(2 * df - n_hits), term);
  }
  std::sort(ranked.begin(), ranked.end());

  RefinementSuggestion suggestion;
  for (std::size_t i = 0; i < ranked.size() && i < kMaxDiscriminatingTerms; ++i) {
    suggestion.discriminating_terms.push_back(ranked[i].second);
  }
  suggestion.message = "Your question matches " + std::to_string(hits.size()) + " resources. ";
  if (suggestion.discriminating_terms.empty()) {
    suggestion.message += "Try wording it differently or more specifically.";
  } else {
    suggestion.message += "Try wording it differently, for example by adding: ";
    for (std::size_t i = 0; i < suggestion.discriminating_terms.size(); ++i) {
      if (i) suggestion.message += ", ";
      suggestion.message += suggestion.discriminating_terms[i];
    }
    suggestion.message += ".";
  }
  return suggestion;
}

}  // namespace opnav
