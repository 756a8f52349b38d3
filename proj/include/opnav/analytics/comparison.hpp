#pragma once

#include <string>
#include <vector>

#include "opnav/analytics/learning_curve.hpp"
#include "opnav/analytics/mann_whitney.hpp"

namespace opnav::analytics {

/// Rows are operators, columns are per-batch setup minutes.
using SetupMatrix = std::vector<std::vector<double>>;

struct OperatorDataset {
  std::vector<std::string> operator_ids;
  SetupMatrix minutes;
};

/// Parses the operator CSV: header row required, optional leading `operator`
/// column, then batch_1..batch_N. Throws Error(InvalidArgument) with the
/// offending line number.
OperatorDataset parse_operator_csv(const std::string& text);
OperatorDataset load_operator_csv(const std::string& path);
/// Values written with `decimals` fixed digits.
std::string format_operator_csv(const OperatorDataset& data, int decimals = 4);

/// Per-operator cumulative average at production level x (1-based).
std::vector<double> level_values(const SetupMatrix& group, int level);

struct GroupSummary {
  std::vector<double> level_means;  // group mean cumulative average at each level
  learning::DoublingAnalysis doubling;
  learning::LearningCurveModel fit;  // fitted to (level, mean) points
};

/// Throws Error(InsufficientData) when the group has no operators or an
/// operator covers fewer batches than the largest level.
GroupSummary summarize_group(const SetupMatrix& group, const std::vector<int>& levels);

struct ComparisonReport {
  std::vector<int> levels;
  GroupSummary group_a;
  GroupSummary group_b;
  std::vector<double> marginal_differences;  // mean A - mean B per level
  std::vector<stats::MwuResult> tests;
  std::vector<std::vector<double>> values_a;  // per level, per operator
  std::vector<std::vector<double>> values_b;
};

/// Group A is the reference (traditionally trained) group. Each group needs
/// at least two operators.
ComparisonReport compare_groups(const SetupMatrix& group_a, const SetupMatrix& group_b,
                                const std::vector<int>& levels, double alpha,
                                stats::MwuMethod method = stats::MwuMethod::normal);

std::vector<int> default_levels();

}  // namespace opnav::analytics
