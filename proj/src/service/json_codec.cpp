#include "opnav/service/json_codec.hpp"

#include <cstdio>
#include <functional>

namespace opnav::codec {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

Json to_json(const SearchHit& hit) {
  Json j;
  j["node_id"] = hit.node_id;
  j["score"] = hit.score;
  j["matched_terms"] = Json(std::vector<std::string>(hit.matched_terms.begin(), hit.matched_terms.end()));
  return j;
}

Json to_json(const RefinementSuggestion& refinement) {
  Json j;
  j["message"] = refinement.message;
  j["discriminating_terms"] = refinement.discriminating_terms;
  return j;
}

Json to_json(const RelatedResource& related) {
  Json j;
  j["node_id"] = related.node_id;
  j["reason"] = std::string(to_string(related.reason));
  return j;
}

Json to_json(const Answer& answer) {
  Json j;
  j["primary_node"] = answer.primary_node ? Json(*answer.primary_node) : Json(nullptr);
  j["snippet"] = answer.snippet;
  j["alternates"] = Json::array();
  for (const auto& hit : answer.alternates) j["alternates"].push_back(to_json(hit));
  j["suggestions"] = Json::array();
  for (const auto& s : answer.suggestions) j["suggestions"].push_back(to_json(s));
  j["refinement"] = answer.refinement ? to_json(*answer.refinement) : Json(nullptr);
  return j;
}

Json node_to_json(const ContentTree& tree, const ContentNode& node) {
  Json j;
  j["id"] = node.id;
  j["title"] = node.title;
  j["type"] = std::string(to_string(node.node_type));
  j["body"] = node.body;
  j["keywords"] = Json(std::vector<std::string>(node.keywords.begin(), node.keywords.end()));
  j["parent"] = node.parent ? Json(*node.parent) : Json(nullptr);
  j["children"] = Json::array();
  for (const auto& c : node.children) {
    if (const auto* child = tree.find(c)) {
      j["children"].push_back({{"id", child->id}, {"title", child->title}, {"type", std::string(to_string(child->node_type))}});
    }
  }
  j["related"] = node.related;
  j["media"] = node.media_refs;
  return j;
}

Json tree_skeleton(const ContentTree& tree) {
  std::function<Json(const ContentNode&)> walk = [&](const ContentNode& n) {
    Json j;
    j["id"] = n.id;
    j["title"] = n.title;
    j["type"] = std::string(to_string(n.node_type));
    j["children"] = Json::array();
    for (const auto& c : n.children) {
      if (const auto* child = tree.find(c)) j["children"].push_back(walk(*child));
    }
    return j;
  };
  Json j;
  j["version"] = tree.version();
  const auto* root = tree.find(tree.root());
  j["root"] = root ? walk(*root) : Json(nullptr);
  return j;
}

Json to_json(const UsageReport& report) {
  Json j;
  j["node_query_counts"] = Json::object();
  for (const auto& [id, n] : report.node_query_counts) j["node_query_counts"][id] = n;
  j["session_question_counts"] = Json::object();
  for (const auto& [id, n] : report.session_question_counts) j["session_question_counts"][id] = n;
  j["top_procedures"] = Json::array();
  for (const auto& [id, n] : report.top_procedures) j["top_procedures"].push_back({{"node_id", id}, {"count", n}});
  return j;
}

Json to_json(const learning::DoublingAnalysis& d) {
  Json j;
  j["doubling_xs"] = d.doubling_xs;
  j["values"] = d.values;
  j["rates"] = d.rates;
  j["rates_pct"] = d.rates_display();
  j["mean_rate"] = d.mean_rate;
  j["mean_rate_pct"] = d.mean_rate_display();
  return j;
}

Json to_json(const learning::LearningCurveModel& m) {
  Json j;
  j["b0"] = m.b0;
  j["b1"] = m.b1;
  j["b2"] = m.b2;
  j["sse"] = m.sse;
  j["degenerate"] = m.degenerate;
  return j;
}

Json to_json(const stats::MwuResult& r) {
  Json j;
  j["n1"] = r.n1;
  j["n2"] = r.n2;
  j["r1"] = r.r1;
  j["r2"] = r.r2;
  j["u1"] = r.u1;
  j["u2"] = r.u2;
  j["u"] = r.u;
  j["z"] = r.z;
  j["p_two_tailed"] = r.p_two_tailed;
  j["z_display"] = fixed(r.z, 6);
  j["p_display"] = fixed(r.p_two_tailed, 6);
  j["critical_u"] = r.critical_u ? Json(*r.critical_u) : Json(nullptr);
  j["alpha"] = r.alpha;
  j["method"] = std::string(stats::to_string(r.method));
  j["reject"] = r.reject;
  return j;
}

Json to_json(const analytics::GroupSummary& s, const std::vector<int>& levels) {
  Json j;
  j["levels"] = levels;
  j["level_means"] = s.level_means;
  j["doubling"] = to_json(s.doubling);
  j["fit"] = to_json(s.fit);
  std::vector<double> fitted;
  for (int x : levels) fitted.push_back(learning::predict(s.fit, x));
  j["fitted_means"] = fitted;
  return j;
}

Json to_json(const analytics::ComparisonReport& report) {
  Json j;
  j["levels"] = report.levels;
  j["group_a"] = to_json(report.group_a, report.levels);
  j["group_b"] = to_json(report.group_b, report.levels);
  j["marginal_differences"] = report.marginal_differences;
  j["tests"] = Json::array();
  for (std::size_t i = 0; i < report.tests.size(); ++i) {
    auto t = to_json(report.tests[i]);
    t["level"] = report.levels[i];
    j["tests"].push_back(std::move(t));
  }
  return j;
}

Json learning_summary(const analytics::OperatorDataset& data, const std::vector<int>& levels) {
  auto summary = analytics::summarize_group(data.minutes, levels);
  Json j = to_json(summary, levels);
  j["operators"] = data.minutes.size();
  j["batches"] = data.minutes.empty() ? 0 : data.minutes.front().size();
  return j;
}

}  // namespace opnav::codec
