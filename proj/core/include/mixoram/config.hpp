#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace mixoram {

// Flat key=value settings. Blank lines and lines starting with '#' are ignored; keys and
// values are trimmed. Later keys replace earlier ones.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config(std::string_view text);
ConfigMap load_config(const std::filesystem::path& path);

// Typed lookups; throw kInvalidArgument when the value does not parse.
std::uint64_t config_u64(const ConfigMap& cfg, const std::string& key, std::uint64_t fallback);
double config_double(const ConfigMap& cfg, const std::string& key, double fallback);
std::string config_string(const ConfigMap& cfg, const std::string& key, std::string fallback);
bool config_bool(const ConfigMap& cfg, const std::string& key, bool fallback);

}  // namespace mixoram
