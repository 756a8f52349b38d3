#include "opnav/analytics/learning_curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "opnav/error.hpp"

namespace opnav::learning {

namespace {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

// Solves the 3x3 system a * x = b in place; false if singular.
bool solve3(std::array<double, 9> a, std::array<double, 3>& b) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(a[r * 3 + col]) > std::abs(a[pivot * 3 + col])) pivot = r;
    }
    if (std::abs(a[pivot * 3 + col]) < 1e-300) return false;
    if (pivot != col) {
      for (int c = 0; c < 3; ++c) std::swap(a[col * 3 + c], a[pivot * 3 + c]);
      std::swap(b[col], b[pivot]);
    }
    for (int r = col + 1; r < 3; ++r) {
      double f = a[r * 3 + col] / a[col * 3 + col];
      for (int c = col; c < 3; ++c) a[r * 3 + c] -= f * a[col * 3 + c];
      b[r] -= f * b[col];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < 3; ++c) s -= a[r * 3 + c] * b[c];
    b[r] = s / a[r * 3 + r];
  }
  return true;
}

struct Params {
  double b0, b1, b2;
};

Params project(Params p) { return {std::max(0.0, p.b0), std::max(0.0, p.b1), std::max(0.0, p.b2)}; }

// Levenberg-style damped Gauss-Newton with projection onto the non-negative
// orthant. Only SSE-decreasing steps are accepted.
LearningCurveModel refine(std::span<const CurvePoint> points, Params p, const FitOptions& options) {
  std::vector<double> r, jac;
  double sse = sum_squared_error(points, p.b0, p.b1, p.b2);
  double lambda = 1e-3;
  int iter = 0;
  for (; iter < options.max_iterations && sse > 0.0; ++iter) {
    residuals_and_jacobian(points, p.b0, p.b1, p.b2, r, jac);
    std::array<double, 9> jtj{};
    std::array<double, 3> jtr{};
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (int a = 0; a < 3; ++a) {
        jtr[a] += jac[i * 3 + a] * r[i];
        for (int b = 0; b < 3; ++b) jtj[a * 3 + b] += jac[i * 3 + a] * jac[i * 3 + b];
      }
    }

    bool accepted = false;
    double new_sse = sse;
    while (lambda < 1e16) {
      auto damped = jtj;
      for (int a = 0; a < 3; ++a) damped[a * 3 + a] += lambda * std::max(jtj[a * 3 + a], 1e-12);
      std::array<double, 3> step{-jtr[0], -jtr[1], -jtr[2]};
      if (solve3(damped, step)) {
        Params trial = project({p.b0 + step[0], p.b1 + step[1], p.b2 + step[2]});
        new_sse = sum_squared_error(points, trial.b0, trial.b1, trial.b2);
        if (std::isfinite(new_sse) && new_sse < sse) {
          p = trial;
          accepted = true;
          lambda = std::max(lambda / 10.0, 1e-12);
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!accepted) break;
    double rel = (sse - new_sse) / sse;
    sse = new_sse;
    if (rel < options.relative_tolerance) {
      ++iter;
      break;
    }
  }
  return {p.b0, p.b1, p.b2, sse, false, iter};
}

}  // namespace

std::vector<CurvePoint> cumulative_average(std::span<const double> times) {
  if (times.empty()) throw Error(ErrorCode::EmptyInput, "no setup times");
  std::vector<CurvePoint> out;
  out.reserve(times.size());
  double total = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "setup times must be positive");
    total += times[i];
    out.push_back({static_cast<double>(i + 1), total / static_cast<double>(i + 1)});
  }
  return out;
}

std::vector<std::string> DoublingAnalysis::rates_display() const {
  std::vector<std::string> out;
  for (double r : rates) out.push_back(fixed(100.0 * r, 1));
  return out;
}

std::string DoublingAnalysis::mean_rate_display() const { return fixed(100.0 * mean_rate, 2); }

DoublingAnalysis doubling_rates(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorCode::InsufficientData, "doubling analysis needs at least two values");
  DoublingAnalysis out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "doubling values must be positive");
    out.doubling_xs.push_back(std::ldexp(1.0, static_cast<int>(i)));
    out.values.push_back(values[i]);
  }
  for (std::size_t i = 0; i + 1 < values.size(); ++i) out.rates.push_back(values[i + 1] / values[i]);
  out.mean_rate = std::accumulate(out.rates.begin(), out.rates.end(), 0.0) / static_cast<double>(out.rates.size());
  return out;
}

double predict(const LearningCurveModel& model, double x) { return model.b0 + model.b1 * std::pow(x, -model.b2); }

void residuals_and_jacobian(std::span<const CurvePoint> points, double b0, double b1, double b2,
                            std::vector<double>& residuals, std::vector<double>& jacobian) {
  residuals.resize(points.size());
  jacobian.resize(points.size() * 3);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = points[i].x;
    const double power = std::pow(x, -b2);
    residuals[i] = points[i].y - (b0 + b1 * power);
    jacobian[i * 3 + 0] = -1.0;
    jacobian[i * 3 + 1] = -power;
    jacobian[i * 3 + 2] = b1 * power * std::log(x);
  }
}

double sum_squared_error(std::span<const CurvePoint> points, double b0, double b1, double b2) {
  double sse = 0.0;
  for (const auto& p : points) {
    double r = p.y - (b0 + b1 * std::pow(p.x, -b2));
    sse += r * r;
  }
  return sse;
}

LearningCurveModel fit_towill(std::span<const CurvePoint> points, const FitOptions& options) {
  if (points.size() < 4) throw Error(ErrorCode::InsufficientData, "curve fit needs at least 4 points");
  std::vector<double> xs;
  for (const auto& p : points) {
    if (!(p.x >= 1.0) || !(p.y > 0.0)) throw Error(ErrorCode::InvalidArgument, "curve points need x >= 1, y > 0");
    xs.push_back(p.x);
  }
  std::sort(xs.begin(), xs.end());
  if (std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
    throw Error(ErrorCode::InsufficientData, "curve fit needs distinct x values");
  }

  const auto [min_it, max_it] =
      std::minmax_element(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.y < b.y; });
  if (min_it->y == max_it->y) {
    LearningCurveModel flat{min_it->y, 0.0, 0.0, 0.0, true, 0};
    flat.sse = sum_squared_error(points, flat.b0, 0.0, 0.0);
    return flat;
  }

  const auto first = std::min_element(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
  const double b0_start = 0.9 * min_it->y;
  const double b1_start = std::max(0.0, first->y - b0_start);

  LearningCurveModel best;
  bool have_best = false;
  const int n_starts = static_cast<int>(std::floor((options.start_b2_max - options.start_b2_min) / options.start_b2_step + 1e-9)) + 1;
  for (int s = 0; s < n_starts; ++s) {
    const double b2_start = options.start_b2_min + s * options.start_b2_step;
    auto model = refine(points, {b0_start, b1_start, b2_start}, options);
    if (!have_best || model.sse < best.sse) {
      best = model;
      have_best = true;
    }
  }
  return best;
}

}  // namespace opnav::learning
