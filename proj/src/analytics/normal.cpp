#include "opnav/analytics/normal.hpp"

#include <cmath>
#include <numbers>

namespace opnav::stats {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

}  // namespace opnav::stats
