#include "opnav/analytics/comparison.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "opnav/error.hpp"

namespace opnav::analytics {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void bad_csv(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, "csv line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

OperatorDataset parse_operator_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw Error(ErrorCode::EmptyInput, "csv has no header row");

  const bool has_operator = header.front() == "operator";
  const std::size_t first_batch = has_operator ? 1 : 0;
  if (header.size() <= first_batch) bad_csv(line_no, "no batch columns");
  for (std::size_t c = first_batch; c < header.size(); ++c) {
    if (header[c] != "batch_" + std::to_string(c - first_batch + 1)) {
      bad_csv(line_no, "expected column batch_" + std::to_string(c - first_batch + 1) + ", found '" + header[c] + "'");
    }
  }

  OperatorDataset data;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) bad_csv(line_no, "expected " + std::to_string(header.size()) + " fields");
    data.operator_ids.push_back(has_operator ? fields.front() : "op" + std::to_string(data.minutes.size() + 1));
    std::vector<double> row;
    for (std::size_t c = first_batch; c < fields.size(); ++c) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(fields[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != fields[c].size()) bad_csv(line_no, "not a number: '" + fields[c] + "'");
      if (!(v > 0.0)) bad_csv(line_no, "setup minutes must be positive");
      row.push_back(v);
    }
    data.minutes.push_back(std::move(row));
  }
  if (data.minutes.empty()) throw Error(ErrorCode::EmptyInput, "csv has no operator rows");
  return data;
}

OperatorDataset load_operator_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_operator_csv(buf.str());
}

std::string format_operator_csv(const OperatorDataset& data, int decimals) {
  std::string out = "operator";
  const std::size_t batches = data.minutes.empty() ? 0 : data.minutes.front().size();
  for (std::size_t b = 1; b <= batches; ++b) out += ",batch_" + std::to_string(b);
  out += '\n';
  char buf[64];
  for (std::size_t r = 0; r < data.minutes.size(); ++r) {
    out += r < data.operator_ids.size() ? data.operator_ids[r] : "op" + std::to_string(r + 1);
    for (double v : data.minutes[r]) {
      std::snprintf(buf, sizeof buf, ",%.*f", decimals, v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::vector<double> level_values(const SetupMatrix& group, int level) {
  std::vector<double> out;
  out.reserve(group.size());
  for (const auto& row : group) {
    if (level < 1 || static_cast<std::size_t>(level) > row.size()) {
      throw Error(ErrorCode::InsufficientData, "operator covers " + std::to_string(row.size()) +
                                                   " batches, level " + std::to_string(level) + " requested");
    }
    double total = 0.0;
    for (int k = 0; k < level; ++k) total += row[static_cast<std::size_t>(k)];
    out.push_back(total / level);
  }
  return out;
}

GroupSummary summarize_group(const SetupMatrix& group, const std::vector<int>& levels) {
  if (group.empty()) throw Error(ErrorCode::InsufficientData, "group has no operators");
  GroupSummary s;
  std::vector<learning::CurvePoint> points;
  for (int level : levels) {
    auto values = level_values(group, level);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    s.level_means.push_back(mean);
    points.push_back({static_cast<double>(level), mean});
  }
  s.doubling = learning::doubling_rates(s.level_means);
  s.doubling.doubling_xs.assign(levels.begin(), levels.end());
  s.fit = learning::fit_towill(points);
  return s;
}

ComparisonReport compare_groups(const SetupMatrix& group_a, const SetupMatrix& group_b,
                                const std::vector<int>& levels, double alpha, stats::MwuMethod method) {
  if (group_a.size() < 2 || group_b.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "each group needs at least two operators");
  }
  ComparisonReport report;
  report.levels = levels;
  report.group_a = summarize_group(group_a, levels);
  report.group_b = summarize_group(group_b, levels);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    report.marginal_differences.push_back(report.group_a.level_means[i] - report.group_b.level_means[i]);
    report.values_a.push_back(level_values(group_a, levels[i]));
    report.values_b.push_back(level_values(group_b, levels[i]));
    report.tests.push_back(stats::mann_whitney(report.values_a.back(), report.values_b.back(), alpha, method));
  }
  return report;
}

std::vector<int> default_levels() {
  return {learning::kDoublingLevels.begin(), learning::kDoublingLevels.end()};
}

}  // namespace opnav::analytics
