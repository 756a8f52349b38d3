#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace opnav::config {

/// Parses the TOML subset used by our config files into a JSON object:
/// `key = value` pairs, `[table]` and `[[array-of-tables]]` headers, basic and
/// literal strings, integers, floats, booleans, and single-line arrays of
/// those. Dotted keys, inline tables, dates and multi-line strings are
/// rejected. Throws Error(ConfigError) with the line number.
nlohmann::json parse_toml(std::string_view text);
nlohmann::json load_toml(const std::string& path);

}  // namespace opnav::config
