#pragma once

#include <map>
#include <string>
#include <vector>

namespace pmsim {

// Flat section.key -> value map parsed from INI-style text; values stay
// strings until a typed getter pulls them.
using ConfigMap = std::map<std::string, std::string>;

// Parses "[section]" headers and "key = value" lines; '#' and ';' start
// comments. Throws std::invalid_argument naming the offending line.
ConfigMap parse_config_text(const std::string& text);

ConfigMap load_config_file(const std::string& path);

// Merges --set style overrides ("section.key=value") into the map.
void apply_override(ConfigMap& cfg, const std::string& assignment);

// Every key the schema knows, with its default value and a one-line
// description for the manifest.
struct ConfigEntry {
  std::string key;
  std::string default_value;
  std::string description;
};

const std::vector<ConfigEntry>& config_schema();

// Rejects keys outside the schema, naming each unknown key exactly.
void validate_keys(const ConfigMap& cfg);

double get_double(const ConfigMap& cfg, const std::string& key);
int get_int(const ConfigMap& cfg, const std::string& key);
bool get_bool(const ConfigMap& cfg, const std::string& key);
std::string get_string(const ConfigMap& cfg, const std::string& key);

// The schema defaults with cfg's entries laid over them.
ConfigMap resolve_with_defaults(const ConfigMap& cfg);

}  // namespace pmsim
