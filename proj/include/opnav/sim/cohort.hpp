#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opnav/analytics/comparison.hpp"
#include "opnav/analytics/learning_curve.hpp"
#include "opnav/sim/threefry.hpp"

namespace opnav::sim {

/// Multiplicative noise applied to each batch's setup time.
enum class NoiseModel {
  truncated_gaussian,  // max(floor, 1 + cv * g)
  lognormal,           // exp(sigma g - sigma^2 / 2), sigma^2 = ln(1 + cv^2)
};

/// What the curve describes.
enum class CurveTarget {
  cumulative_average,  // noise-free cumulative averages follow the curve
  unit_time,           // noise-free per-batch times follow the curve
};

inline constexpr double kMultiplierFloor = 0.05;

struct OperatorNoise {
  double cv = 0.1233;
  NoiseModel model = NoiseModel::truncated_gaussian;
  CurveTarget target = CurveTarget::cumulative_average;
};

/// Noise-free per-batch times for batches 1..n.
std::vector<double> deterministic_times(const learning::LearningCurveModel& curve, int batches, CurveTarget target);

/// Setup minutes for batches 1..n: deterministic time times a noise multiplier
/// drawn from `stream` (one draw per batch).
std::vector<double> simulate_operator(const learning::LearningCurveModel& curve, const OperatorNoise& noise,
                                      int batches, CounterStream& stream);

struct GroupSpec {
  std::string name;
  learning::LearningCurveModel curve;
};

struct CohortConfig {
  int operators_per_group = 10;
  int batches = 64;
  std::vector<GroupSpec> groups;
  OperatorNoise noise;
  std::uint64_t seed = 0;
};

struct CohortGroup {
  std::string name;
  analytics::OperatorDataset data;
};

struct CohortDataset {
  std::vector<CohortGroup> groups;
  std::uint64_t seed = 0;
  std::string config_hash;  // FNV-1a of the canonical config JSON, hex
  std::string rng_id{kRngId};
  int format_version = 1;

  const CohortGroup* group(const std::string& name) const;
};

/// Operator o of group g draws from the stream keyed (seed, fnv1a64(g.name))
/// with substream o, so neither group order nor group size changes existing
/// operators' data. Throws Error(InvalidArgument) for an invalid config.
CohortDataset simulate_cohort(const CohortConfig& config);

/// Canonical JSON text of the config (also hashed into the metadata).
std::string cohort_config_json(const CohortConfig& config);
/// Sidecar metadata: seed, config, RNG id, format version, noise notes.
std::string cohort_metadata_json(const CohortConfig& config, const CohortDataset& dataset);

/// Curves for the two reference groups, fitted to the reference group means.
CohortConfig default_cohort_config(std::uint64_t seed);

/// Steady-state process parameters of the milling cell.
struct ProcessParams {
  double avg_cycle_time_s = 4994.0;  // 01:23:14
  double cycle_cv = 0.1063;
  double avg_setup_time_min = 16.97;
  double setup_cv = 0.1233;
  double defect_rate = 0.02;
  int batch_size = 100;
};

void validate(const ProcessParams& params);  // throws Error(InvalidArgument)

struct BatchRecord {
  double mean_cycle_s = 0.0;
  double min_cycle_s = 0.0;
  double max_cycle_s = 0.0;
  double setup_min = 0.0;
  int defects = 0;
};

/// Per piece: cycle time normal(mean, cv * mean) floored at 0.05 * mean and a
/// Bernoulli(defect_rate) defect draw. Per batch: one setup time draw.
std::vector<BatchRecord> simulate_production(const ProcessParams& params, int batches, CounterStream& stream);

}  // namespace opnav::sim
