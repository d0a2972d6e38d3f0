#pragma once

// Key=value run configuration: one shared parse/validate path for config
// files and command-line flags, with per-subcommand schemas, defaults and
// unknown-key rejection.

#include <map>
#include <string>
#include <vector>

namespace sflab::cli {

struct Config {
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) > 0; }
    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    /// "a..b" inclusive integer range.
    std::pair<int, int> get_range(const std::string& key) const;
    /// comma-separated doubles.
    std::vector<double> get_list(const std::string& key) const;
};

/// Parses `key = value` lines ('#' comments, blank lines ignored).
Config parse_config_text(const std::string& text);

/// Canonical serialization (sorted keys); parse(serialize(c)) == c.
std::string serialize_config(const Config& c);

struct ValidatedConfig {
    Config config;                       // defaults filled, echoes added
    std::vector<std::string> warnings;
};

/// Known subcommand names.
const std::vector<std::string>& subcommands();

/// Applies the subcommand schema: rejects unknown keys, fills defaults
/// (c = 2(pi rho)^2, d = pi rho, convention = m-half, tol = 1e-10, ...),
/// validates parity/ranges and echoes the prescription for requested
/// velocities (key "v-applied"). Throws ConfigError.
ValidatedConfig validate_config(const Config& raw, const std::string& subcommand);

} // namespace sflab::cli
