#pragma once

#include <string>

#include <json.hpp>

#include "opnav/analytics/comparison.hpp"
#include "opnav/analytics/learning_curve.hpp"
#include "opnav/analytics/mann_whitney.hpp"
#include "opnav/assistant/assistant.hpp"
#include "opnav/assistant/telemetry.hpp"
#include "opnav/knowledge/corpus.hpp"

namespace opnav::codec {

using Json = nlohmann::ordered_json;

/// Fixed-point text with `decimals` digits, as used in reports.
std::string fixed(double value, int decimals);

Json to_json(const SearchHit& hit);
Json to_json(const RefinementSuggestion& refinement);
Json to_json(const RelatedResource& related);
Json to_json(const Answer& answer);

/// Node with its children reduced to {id, title, type}.
Json node_to_json(const ContentTree& tree, const ContentNode& node);
/// Nested {id, title, type, children} skeleton from the root.
Json tree_skeleton(const ContentTree& tree);

Json to_json(const UsageReport& report);
Json to_json(const learning::DoublingAnalysis& doubling);
Json to_json(const learning::LearningCurveModel& model);
Json to_json(const stats::MwuResult& result);
Json to_json(const analytics::GroupSummary& summary, const std::vector<int>& levels);
Json to_json(const analytics::ComparisonReport& report);

/// Summary of a single operator dataset: per-level means, doubling rates,
/// fitted curve and the fitted prediction at each level.
Json learning_summary(const analytics::OperatorDataset& data, const std::vector<int>& levels);

}  // namespace opnav::codec
