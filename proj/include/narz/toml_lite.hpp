#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace narz {

/// Parser for the TOML subset the experiment configs use: [section] and
/// [a.b] tables, `key = value` with strings, numbers, booleans and flat
/// arrays, `#` comments. Produces the JSON-equivalent object.
nlohmann::json parse_toml_lite(const std::string& text);

/// Load a config file as JSON; `.toml` goes through the subset parser,
/// anything else is parsed as JSON.
nlohmann::json load_config_json(const std::filesystem::path& path);

}  // namespace narz
