#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "opnav/sim/cohort.hpp"

namespace opnav::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (args excludes the program name). Machine-readable
/// output goes to `out`, diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Cohort config from parsed TOML. Groups given by `means` (seven values at
/// x = 1, 2, ..., 64) are fitted; groups given by b0/b1/b2 are used as is.
/// No [[group]] tables means the two reference groups.
sim::CohortConfig cohort_config_from_json(const nlohmann::json& j);
sim::CohortConfig load_cohort_config(const std::string& path);

/// Directory holding the bundled datasets (overridable with OPNAV_DATA_DIR).
std::string default_data_dir();

}  // namespace opnav::cli
