#include "opnav/sim/cohort.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "opnav/error.hpp"
#include "opnav/sim/reference.hpp"

namespace opnav::sim {

namespace {

double noise_multiplier(const OperatorNoise& noise, double g) {
  if (noise.model == NoiseModel::lognormal) {
    const double sigma2 = std::log1p(noise.cv * noise.cv);
    return std::exp(std::sqrt(sigma2) * g - 0.5 * sigma2);
  }
  return std::max(kMultiplierFloor, 1.0 + noise.cv * g);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string operator_id(const std::string& group, int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "-%02d", index + 1);
  return group + buf;
}

}  // namespace

std::vector<double> deterministic_times(const learning::LearningCurveModel& curve, int batches, CurveTarget target) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(batches, 0)));
  for (int k = 1; k <= batches; ++k) {
    const double yk = learning::predict(curve, k);
    if (target == CurveTarget::unit_time) {
      out.push_back(yk);
    } else {
      // Marginal time that moves the cumulative average from y(k-1) to y(k).
      const double prev_total = k > 1 ? (k - 1) * learning::predict(curve, k - 1) : 0.0;
      out.push_back(std::max(k * yk - prev_total, kMultiplierFloor * yk));
    }
  }
  return out;
}

std::vector<double> simulate_operator(const learning::LearningCurveModel& curve, const OperatorNoise& noise,
                                      int batches, CounterStream& stream) {
  if (batches < 1) throw Error(ErrorCode::InvalidArgument, "batches must be >= 1");
  auto times = deterministic_times(curve, batches, noise.target);
  for (auto& t : times) t *= noise_multiplier(noise, stream.next_normal());
  return times;
}

const CohortGroup* CohortDataset::group(const std::string& name) const {
  for (const auto& g : groups) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

std::string cohort_config_json(const CohortConfig& config) {
  nlohmann::ordered_json j;
  j["seed"] = config.seed;
  j["operators_per_group"] = config.operators_per_group;
  j["batches"] = config.batches;
  j["noise_cv"] = config.noise.cv;
  j["noise_model"] = config.noise.model == NoiseModel::lognormal ? "lognormal" : "truncated_gaussian";
  j["curve_target"] = config.noise.target == CurveTarget::unit_time ? "unit_time" : "cumulative_average";
  auto groups = nlohmann::ordered_json::array();
  for (const auto& g : config.groups) {
    nlohmann::ordered_json gj;
    gj["name"] = g.name;
    gj["b0"] = g.curve.b0;
    gj["b1"] = g.curve.b1;
    gj["b2"] = g.curve.b2;
    groups.push_back(gj);
  }
  j["groups"] = groups;
  return j.dump();
}

CohortDataset simulate_cohort(const CohortConfig& config) {
  if (config.operators_per_group < 1) throw Error(ErrorCode::InvalidArgument, "operators_per_group must be >= 1");
  if (config.batches < 1) throw Error(ErrorCode::InvalidArgument, "batches must be >= 1");
  if (!(config.noise.cv >= 0.0 && config.noise.cv < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise_cv must lie in [0, 1)");
  }
  for (std::size_t i = 0; i < config.groups.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (config.groups[i].name == config.groups[j].name) {
        throw Error(ErrorCode::InvalidArgument, "duplicate group name '" + config.groups[i].name + "'");
      }
    }
  }

  CohortDataset dataset;
  dataset.seed = config.seed;
  dataset.config_hash = hex64(fnv1a64(cohort_config_json(config)));
  for (const auto& spec : config.groups) {
    CohortGroup group{spec.name, {}};
    for (int o = 0; o < config.operators_per_group; ++o) {
      auto stream = CounterStream::named(config.seed, spec.name, static_cast<std::uint64_t>(o));
      group.data.operator_ids.push_back(operator_id(spec.name, o));
      group.data.minutes.push_back(simulate_operator(spec.curve, config.noise, config.batches, stream));
    }
    dataset.groups.push_back(std::move(group));
  }
  return dataset;
}

std::string cohort_metadata_json(const CohortConfig& config, const CohortDataset& dataset) {
  nlohmann::ordered_json j;
  j["format_version"] = dataset.format_version;
  j["rng"] = dataset.rng_id;
  j["seed"] = dataset.seed;
  j["config_hash"] = dataset.config_hash;
  j["config"] = nlohmann::ordered_json::parse(cohort_config_json(config));
  j["stream_split"] = "key=(seed, fnv1a64(group name)), counter=(draw index, operator index)";
  j["noise_note"] = "one multiplicative draw per batch with the same cv at every batch";
  auto files = nlohmann::ordered_json::array();
  for (const auto& g : dataset.groups) files.push_back(g.name + ".csv");
  j["files"] = files;
  return j.dump(2) + "\n";
}

CohortConfig default_cohort_config(std::uint64_t seed) {
  CohortConfig config;
  config.seed = seed;
  config.groups.push_back({"traditional", reference_curve(kTraditionalMeans)});
  config.groups.push_back({"assisted", reference_curve(kAssistedMeans)});
  return config;
}

void validate(const ProcessParams& p) {
  if (!(p.avg_cycle_time_s > 0.0) || !(p.avg_setup_time_min > 0.0) || p.batch_size < 1) {
    throw Error(ErrorCode::InvalidArgument, "process parameters must be positive");
  }
  if (!(p.cycle_cv >= 0.0 && p.cycle_cv < 1.0) || !(p.setup_cv >= 0.0 && p.setup_cv < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "coefficients of variation must lie in [0, 1)");
  }
  if (!(p.defect_rate >= 0.0 && p.defect_rate <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "defect rate must lie in [0, 1]");
  }
}

std::vector<BatchRecord> simulate_production(const ProcessParams& params, int batches, CounterStream& stream) {
  validate(params);
  std::vector<BatchRecord> out;
  out.reserve(static_cast<std::size_t>(std::max(batches, 0)));
  for (int b = 0; b < batches; ++b) {
    BatchRecord rec;
    rec.setup_min = params.avg_setup_time_min * std::max(kMultiplierFloor, 1.0 + params.setup_cv * stream.next_normal());
    double total = 0.0;
    for (int piece = 0; piece < params.batch_size; ++piece) {
      const double cycle =
          params.avg_cycle_time_s * std::max(kMultiplierFloor, 1.0 + params.cycle_cv * stream.next_normal());
      total += cycle;
      rec.min_cycle_s = piece == 0 ? cycle : std::min(rec.min_cycle_s, cycle);
      rec.max_cycle_s = piece == 0 ? cycle : std::max(rec.max_cycle_s, cycle);
      if (stream.next_uniform() < params.defect_rate) ++rec.defects;
    }
    rec.mean_cycle_s = total / params.batch_size;
    out.push_back(rec);
  }
  return out;
}

}  // namespace opnav::sim
