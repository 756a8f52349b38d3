#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace opnav::learning {

/// x: cumulative batches produced (>= 1); y: cumulative average setup minutes.
struct CurvePoint {
  double x = 1.0;
  double y = 0.0;

  bool operator==(const CurvePoint&) const = default;
};

/// Production levels at which doubling rates are read off.
inline constexpr std::array<int, 7> kDoublingLevels{1, 2, 4, 8, 16, 32, 64};

/// Point i has x = i + 1 and y = mean of the first i + 1 times.
/// Throws Error(EmptyInput) or Error(InvalidArgument) for non-positive times.
std::vector<CurvePoint> cumulative_average(std::span<const double> times);

struct DoublingAnalysis {
  std::vector<double> doubling_xs;
  std::vector<double> values;
  std::vector<double> rates;  // values[i+1] / values[i], as fractions
  double mean_rate = 0.0;

  /// Rates as percentages with one decimal ("97.0").
  std::vector<std::string> rates_display() const;
  /// Mean rate as a percentage with two decimals ("91.85").
  std::string mean_rate_display() const;
};

/// `values` are read at x = 1, 2, 4, ... Throws Error(InsufficientData) for
/// fewer than two values, Error(InvalidArgument) for non-positive ones.
DoublingAnalysis doubling_rates(std::span<const double> values);

/// Towill-Cherrington curve y = b0 + b1 * x^(-b2).
struct LearningCurveModel {
  double b0 = 0.0;  // asymptotic minimum time
  double b1 = 0.0;  // maximum possible reduction
  double b2 = 0.0;  // decay exponent
  double sse = 0.0;
  bool degenerate = false;  // all y equal: b2 not identifiable
  int iterations = 0;
};

double predict(const LearningCurveModel& model, double x);

/// Residuals r_i = y_i - (b0 + b1 x_i^-b2) and their Jacobian (row-major,
/// n x 3) with respect to (b0, b1, b2).
void residuals_and_jacobian(std::span<const CurvePoint> points, double b0, double b1, double b2,
                            std::vector<double>& residuals, std::vector<double>& jacobian);

double sum_squared_error(std::span<const CurvePoint> points, double b0, double b1, double b2);

struct FitOptions {
  double start_b2_min = 0.1;
  double start_b2_max = 2.0;
  double start_b2_step = 0.1;
  double relative_tolerance = 1e-10;
  int max_iterations = 500;
};

/// Bounded least-squares fit (b0, b1, b2 >= 0) by multi-start damped
/// Gauss-Newton. Starts: b2 on the configured grid, b0 = 0.9 min(y),
/// b1 = y(smallest x) - b0. Lowest SSE wins; ties go to the lower start b2.
/// Throws Error(InsufficientData) for fewer than 4 points or repeated x.
LearningCurveModel fit_towill(std::span<const CurvePoint> points, const FitOptions& options = {});

}  // namespace opnav::learning
