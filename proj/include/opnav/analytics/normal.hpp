#pragma once

namespace opnav::stats {

/// Standard normal CDF.
double normal_cdf(double z);

/// Upper tail 1 - Phi(z), computed without cancellation.
double normal_sf(double z);

}  // namespace opnav::stats
