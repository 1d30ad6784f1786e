#pragma once

// Experiment configuration: a strict JSON document
//   {"command": ..., "parameters": {...}, "tolerances": {...}, "output": {...}}
// resolved against per-command parameter tables.

#include "gflow/io/output.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gflow::cli {

using io::Json;

/// Rejected configuration; maps to exit status 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Kind { number, integer, text, boolean };

struct ParamSpec {
  std::string name;
  Kind kind;
  Json fallback;
  std::string help;
  std::vector<std::string> choices = {}; // text parameters only
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<ParamSpec> params;
};

const std::vector<CommandSpec>& commands();
const CommandSpec& find_command(const std::string& name);

/// Parses a config file; syntax errors carry line and column.
Json load_config_file(const std::string& path);

/// Converts flag text to a JSON value of the given kind; numbers must be finite.
Json parse_value(const ParamSpec& spec, const std::string& text, const std::string& where);

/// Default configuration for a command, output directory from default_dir.
Json defaults(const CommandSpec& cmd, const std::string& default_dir);

/// Merges a user document into the defaults after strict validation: unknown
/// keys, wrong types, non-finite numbers and invalid choices throw ConfigError
/// naming the field.
Json resolve(const CommandSpec& cmd, const Json& user, const std::string& default_dir);

/// Typed accessors on a resolved config.
double num(const Json& cfg, const std::string& key);
long long integer(const Json& cfg, const std::string& key);
std::string text(const Json& cfg, const std::string& key);
bool flag(const Json& cfg, const std::string& key);

} // namespace gflow::cli
