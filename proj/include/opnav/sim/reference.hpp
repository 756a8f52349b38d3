#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "opnav/analytics/comparison.hpp"
#include "opnav/analytics/learning_curve.hpp"

namespace opnav::sim {

/// Reference group-mean cumulative average setup minutes at x = 1, 2, 4, ..., 64.
inline constexpr std::array<double, 7> kTraditionalMeans{27.88, 27.05, 25.72, 23.69, 21.39, 18.97, 16.68};
inline constexpr std::array<double, 7> kAssistedMeans{26.47, 24.72, 22.62, 20.45, 18.18, 15.92, 13.87};

/// Reference rank sums (traditional, assisted) per level: 152/58 at the first
/// batch, 155/55 at every later level.
inline constexpr std::array<double, 7> kReferenceRankSumsA{152, 155, 155, 155, 155, 155, 155};

/// Towill curve fitted to group means read at the doubling levels.
learning::LearningCurveModel reference_curve(std::span<const double, 7> means);

struct ReferenceOptions {
  std::uint64_t first_seed = 1;
  std::uint64_t max_attempts = 100000;
  double noise_cv = 0.04;
  int operators_per_group = 10;
  int batches = 64;
  int decimals = 4;
};

struct ReferenceCohort {
  analytics::OperatorDataset traditional;
  analytics::OperatorDataset assisted;
  std::uint64_t seed = 0;  // first seed whose adjusted data matched the rank sums
};

/// Shifts every operator's batches in segment (x_{j-1}, x_j] by a common
/// offset so the group mean cumulative average at x_j equals target[j].
void adjust_to_level_means(analytics::SetupMatrix& group, std::span<const double, 7> targets);

/// Simulates low-noise cohorts from successive seeds, mean-adjusts them to
/// the reference columns, rounds to `decimals`, and returns the first whose
/// per-level rank sums equal the reference ones. Throws Error(InvalidArgument)
/// if no seed matches within max_attempts.
ReferenceCohort build_reference_cohort(const ReferenceOptions& options = {});

}  // namespace opnav::sim
