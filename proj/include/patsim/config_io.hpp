#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "patsim/scenario.hpp"

namespace patsim {

/// Value of one config key. monostate marks an unset optional.
using ConfigValue = std::variant<std::monostate, double, long long, std::uint64_t, std::string>;

/// All recognised keys, in echo order.
const std::vector<std::string_view>& config_keys();

/// Parses `value` for `key` and stores it. Throws ConfigError for an unknown
/// key or a malformed value. Does not validate the whole config.
void set_config_value(ScenarioConfig& cfg, std::string_view key, std::string_view value);

ConfigValue get_config_value(const ScenarioConfig& cfg, std::string_view key);

/// Flat `key = value` text with `#` comments. Missing keys keep their
/// defaults; the result is validated.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Text form that parse_config reads back to an identical config.
std::string echo_config(const ScenarioConfig& cfg);

}  // namespace patsim
