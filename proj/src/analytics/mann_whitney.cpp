#include "opnav/analytics/mann_whitney.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

#include "opnav/analytics/normal.hpp"
#include "opnav/error.hpp"

namespace opnav::stats {

namespace {

struct ExactCache {
  std::mutex mutex;
  std::map<std::pair<int, int>, std::unique_ptr<const std::vector<std::uint64_t>>> tables;
};

ExactCache& exact_cache() {
  static ExactCache cache;
  return cache;
}

std::vector<std::uint64_t> compute_counts(int n1, int n2) {
  // layer[j] holds the counts for (i, j) with i the current row.
  std::vector<std::vector<std::uint64_t>> prev(static_cast<std::size_t>(n2) + 1, std::vector<std::uint64_t>{1});
  for (int i = 1; i <= n1; ++i) {
    std::vector<std::vector<std::uint64_t>> cur(static_cast<std::size_t>(n2) + 1);
    cur[0] = {1};
    for (int j = 1; j <= n2; ++j) {
      std::vector<std::uint64_t> row(static_cast<std::size_t>(i * j) + 1, 0);
      const auto& up = prev[static_cast<std::size_t>(j)];     // (i-1, j)
      const auto& left = cur[static_cast<std::size_t>(j - 1)];  // (i, j-1)
      for (std::size_t u = 0; u < row.size(); ++u) {
        std::uint64_t v = 0;
        if (u >= static_cast<std::size_t>(j) && u - j < up.size()) v += up[u - j];
        if (u < left.size()) v += left[u];
        row[u] = v;
      }
      cur[static_cast<std::size_t>(j)] = std::move(row);
    }
    prev = std::move(cur);
  }
  return prev[static_cast<std::size_t>(n2)];
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
}

}  // namespace

std::string_view to_string(MwuMethod method) { return method == MwuMethod::exact ? "exact" : "normal"; }

std::optional<MwuMethod> parse_mwu_method(std::string_view text) {
  if (text == "normal") return MwuMethod::normal;
  if (text == "exact") return MwuMethod::exact;
  return std::nullopt;
}

std::vector<double> pooled_midranks(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() + b.size();
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
    i = j + 1;
  }
  return ranks;
}

const std::vector<std::uint64_t>& exact_u_counts(int n1, int n2) {
  if (n1 < 0 || n2 < 0 || n1 > kMaxCriticalSize || n2 > kMaxCriticalSize) {
    throw Error(ErrorCode::OutOfRange, "exact U distribution supports group sizes 0..25");
  }
  auto& cache = exact_cache();
  std::lock_guard lock(cache.mutex);
  auto& slot = cache.tables[{n1, n2}];
  if (!slot) slot = std::make_unique<const std::vector<std::uint64_t>>(compute_counts(n1, n2));
  return *slot;
}

double exact_cdf(int n1, int n2, int u) {
  const auto& counts = exact_u_counts(n1, n2);
  if (u < 0) return 0.0;
  std::uint64_t total = 0, below = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    total += counts[k];
    if (k <= static_cast<std::size_t>(u)) below += counts[k];
  }
  return static_cast<double>(below) / static_cast<double>(total);
}

double exact_p_two_tailed(int n1, int n2, int u) { return std::min(1.0, 2.0 * exact_cdf(n1, n2, u)); }

std::optional<int> critical_u(int n1, int n2, double alpha) {
  check_alpha(alpha);
  if (n1 < 1 || n2 < 1 || n1 > kMaxCriticalSize || n2 > kMaxCriticalSize) {
    throw Error(ErrorCode::OutOfRange, "critical values are defined for 1 <= n1, n2 <= 25");
  }
  std::optional<int> result;
  for (int u = 0; u <= n1 * n2; ++u) {
    if (exact_cdf(n1, n2, u) <= alpha / 2.0) {
      result = u;
    } else {
      break;
    }
  }
  return result;
}

MwuResult mann_whitney_from_rank_sums(std::size_t n1, std::size_t n2, double r1, double r2, double alpha,
                                      const MwuOptions& options) {
  if (n1 == 0 || n2 == 0) throw Error(ErrorCode::EmptySample, "both samples must be non-empty");
  check_alpha(alpha);
  MwuResult res;
  res.n1 = n1;
  res.n2 = n2;
  res.r1 = r1;
  res.r2 = r2;
  res.alpha = alpha;
  const double d1 = static_cast<double>(n1), d2 = static_cast<double>(n2);
  res.u1 = r1 - d1 * (d1 + 1.0) / 2.0;
  res.u2 = r2 - d2 * (d2 + 1.0) / 2.0;
  res.u = std::min(res.u1, res.u2);
  double diff = std::abs(res.u - d1 * d2 / 2.0);
  if (options.continuity_correction) diff = std::max(0.0, diff - 0.5);
  const double sigma = std::sqrt(d1 * d2 * (d1 + d2 + 1.0) / 12.0);
  res.z = sigma > 0.0 ? diff / sigma : 0.0;
  res.p_two_tailed = std::min(1.0, 2.0 * normal_sf(res.z));
  if (n1 <= kMaxCriticalSize && n2 <= kMaxCriticalSize) {
    res.critical_u = critical_u(static_cast<int>(n1), static_cast<int>(n2), alpha);
    res.reject = res.critical_u.has_value() && res.u <= *res.critical_u;
  } else {
    res.reject = res.p_two_tailed <= alpha;
  }
  return res;
}

MwuResult mann_whitney(std::span<const double> a, std::span<const double> b, double alpha, MwuMethod method,
                       const MwuOptions& options) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySample, "both samples must be non-empty");
  check_alpha(alpha);
  const auto ranks = pooled_midranks(a, b);
  double r1 = 0.0, r2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r1 += ranks[i];
  for (std::size_t i = a.size(); i < ranks.size(); ++i) r2 += ranks[i];

  // Tied groups, needed both to forbid the exact method and for the variance correction.
  std::vector<double> sorted(ranks);
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    if (t > 1) {
      ties = true;
      tie_term += t * t * t - t;
    }
    i = j;
  }
  if (method == MwuMethod::exact && ties) {
    throw Error(ErrorCode::ExactWithTies, "exact method requires tie-free samples");
  }

  auto res = mann_whitney_from_rank_sums(a.size(), b.size(), r1, r2, alpha, options);
  res.method = method;
  if (options.tie_correction && ties) {
    const double d1 = static_cast<double>(a.size()), d2 = static_cast<double>(b.size()), n = d1 + d2;
    const double var = d1 * d2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    double diff = std::abs(res.u - d1 * d2 / 2.0);
    if (options.continuity_correction) diff = std::max(0.0, diff - 0.5);
    res.z = var > 0.0 ? diff / std::sqrt(var) : 0.0;
    res.p_two_tailed = std::min(1.0, 2.0 * normal_sf(res.z));
    if (!res.critical_u.has_value() && !(a.size() <= kMaxCriticalSize && b.size() <= kMaxCriticalSize)) {
      res.reject = res.p_two_tailed <= alpha;
    }
  }
  if (method == MwuMethod::exact) {
    if (a.size() > kMaxCriticalSize || b.size() > kMaxCriticalSize) {
      throw Error(ErrorCode::OutOfRange, "exact method supports group sizes up to 25");
    }
    res.p_two_tailed = exact_p_two_tailed(static_cast<int>(a.size()), static_cast<int>(b.size()),
                                          static_cast<int>(std::lround(res.u)));
  }
  return res;
}

}  // namespace opnav::stats
