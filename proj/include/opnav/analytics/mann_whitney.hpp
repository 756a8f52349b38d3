#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace opnav::stats {

enum class MwuMethod { normal, exact };

std::string_view to_string(MwuMethod method);
std::optional<MwuMethod> parse_mwu_method(std::string_view text);

struct MwuOptions {
  // Both off reproduces the uncorrected z = |U - n1 n2 / 2| / sigma convention.
  bool continuity_correction = false;
  bool tie_correction = false;
};

struct MwuResult {
  std::size_t n1 = 0, n2 = 0;
  double r1 = 0.0, r2 = 0.0;  // rank sums
  double u1 = 0.0, u2 = 0.0;
  double u = 0.0;             // min(u1, u2)
  double z = 0.0;             // absolute normal-approximation score
  double p_two_tailed = 1.0;  // from the requested method
  std::optional<int> critical_u;  // absent: no rejection possible, or sizes beyond the table range
  bool reject = false;
  double alpha = 0.05;
  MwuMethod method = MwuMethod::normal;
};

/// Midranks (1-based) of the pooled sample a ++ b.
std::vector<double> pooled_midranks(std::span<const double> a, std::span<const double> b);

/// Rank sums, U statistics and |z| from rank sums alone.
MwuResult mann_whitney_from_rank_sums(std::size_t n1, std::size_t n2, double r1, double r2, double alpha,
                                      const MwuOptions& options = {});

/// Two-sided Mann-Whitney U test. Decision: reject iff u <= critical_u; when
/// the sizes exceed the critical-value range (25) the decision falls back to
/// p <= alpha. Throws Error(EmptySample), Error(InvalidArgument) for alpha
/// outside (0, 1), Error(ExactWithTies), Error(OutOfRange) for an exact test
/// beyond 25 per group.
MwuResult mann_whitney(std::span<const double> a, std::span<const double> b, double alpha,
                       MwuMethod method = MwuMethod::normal, const MwuOptions& options = {});

/// Number of rank subsets of size n1 out of n1 + n2 (tie-free) giving each
/// U value 0..n1*n2, by the recursion f(n1, n2, u) = f(n1-1, n2, u-n2) + f(n1, n2-1, u).
/// Memoized; thread-safe.
const std::vector<std::uint64_t>& exact_u_counts(int n1, int n2);

/// P(U <= u) under H0 for tie-free data.
double exact_cdf(int n1, int n2, int u);

/// Two-sided exact p-value min(1, 2 P(U <= u)).
double exact_p_two_tailed(int n1, int n2, int u);

/// Largest u with P(U <= u) <= alpha / 2; nullopt when even u = 0 is too
/// likely. Throws Error(OutOfRange) unless 1 <= n1, n2 <= 25.
std::optional<int> critical_u(int n1, int n2, double alpha);

inline constexpr int kMaxCriticalSize = 25;

}  // namespace opnav::stats
