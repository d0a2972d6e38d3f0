#include "sflab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sflab/errors.hpp"
#include "sflab/girardeau.hpp"
#include "sflab/lattice.hpp"

namespace sflab::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string fmt_full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct KeySpec {
    const char* key;
    const char* fallback;   // nullptr: required
};

const std::map<std::string, std::vector<KeySpec>>& schemas() {
    static const std::map<std::string, std::vector<KeySpec>> table = {
        {"spectrum",
         {{"rho", "1"}, {"N", "7"}, {"L", ""}, {"v", "0"}, {"v-applied", ""},
          {"c", ""}, {"d", ""}, {"convention", "m-half"}, {"budget", "50000000"},
          {"tol", "1e-10"}, {"out", ""}}},
        {"umklapp",
         {{"rho", "1"}, {"N", "7"}, {"L", ""}, {"v", "1"}, {"v-applied", ""},
          {"r-max", ""}, {"budget", "50000000"}, {"tol", "1e-10"}, {"out", ""}}},
        {"ness",
         {{"rho", "1"}, {"v", "1"}, {"j", "3"}, {"L-sweep", "4..64"}, {"out", ""}}},
        {"metastability",
         {{"rho", "1"}, {"N-max", "15"}, {"v-max", ""}, {"c", ""}, {"d", ""},
          {"budget", "50000000"}, {"tol", "1e-12"}, {"out", ""}}},
        {"landau",
         {{"rho", "1"}, {"convention", "both"}, {"k-max", ""}, {"samples", "2000"},
          {"out", ""}}},
        {"sound",
         {{"rho", "1"}, {"N-list", "3,5,7,9,11"}, {"out", ""}}},
        {"kms",
         {{"demo", "all"}, {"beta", "1"}, {"beta-list", "0.1,1,10"},
          {"v-list", "0,0.25,0.5,1"}, {"flux", "0.39269908169872414"},
          {"sites", "4"}, {"systems", "50"}, {"seed", "20240917"}, {"out", ""}}},
        {"meissner",
         {{"units", "dimensionless"}, {"B-ext", "0.001"}, {"R", "1"},
          {"R-ratio", "2"}, {"nodes", "1024"}, {"height", "1"},
          {"n-particles", "1"}, {"coupling", ""}, {"frozen-n0", ""},
          {"mix", "0.5"}, {"tol", "1e-10"}, {"max-iter", "200"},
          {"fit-min", ""}, {"fit-max", ""}, {"k-diagnostic", "false"},
          {"out", ""}}},
        {"extrapolate", {{"input", nullptr}, {"out", ""}}},
    };
    return table;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("malformed numeric value for '" + key + "': '" + value + "'");
    }
}

} // namespace

const std::string& Config::get(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) throw ConfigError("missing config key '" + key + "'");
    return it->second;
}

double Config::get_double(const std::string& key) const {
    return parse_double(key, get(key));
}

int Config::get_int(const std::string& key) const {
    const double x = get_double(key);
    const int i = static_cast<int>(std::llround(x));
    if (std::abs(x - i) > 1e-9)
        throw ConfigError("config key '" + key + "' must be an integer, got '" +
                          get(key) + "'");
    return i;
}

bool Config::get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "' must be a boolean, got '" + v + "'");
}

std::pair<int, int> Config::get_range(const std::string& key) const {
    const std::string& v = get(key);
    const auto sep = v.find("..");
    if (sep == std::string::npos)
        throw ConfigError("config key '" + key + "' must be a range 'a..b', got '" + v + "'");
    const int lo = static_cast<int>(parse_double(key, trim(v.substr(0, sep))));
    const int hi = static_cast<int>(parse_double(key, trim(v.substr(sep + 2))));
    if (lo > hi) throw ConfigError("empty range for '" + key + "': '" + v + "'");
    return {lo, hi};
}

std::vector<double> Config::get_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(get(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) throw ConfigError("empty list for '" + key + "'");
    return out;
}

Config parse_config_text(const std::string& text) {
    Config c;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              " is not 'key = value': '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key on config line " + std::to_string(line_no));
        c.values[key] = value;
    }
    return c;
}

std::string serialize_config(const Config& c) {
    std::string out;
    for (const auto& [k, v] : c.values) out += k + " = " + v + "\n";
    return out;
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = {
        "spectrum", "umklapp", "ness", "metastability", "landau",
        "sound",    "kms",     "meissner", "extrapolate"};
    return names;
}

ValidatedConfig validate_config(const Config& raw, const std::string& subcommand) {
    const auto schema_it = schemas().find(subcommand);
    if (schema_it == schemas().end())
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    const auto& schema = schema_it->second;

    ValidatedConfig out;
    for (const auto& [key, value] : raw.values) {
        const bool known = std::any_of(schema.begin(), schema.end(),
                                       [&](const KeySpec& s) { return key == s.key; });
        if (!known)
            throw ConfigError("unknown key '" + key + "' for subcommand '" +
                              subcommand + "'");
        out.config.values[key] = value;
    }
    for (const KeySpec& s : schema) {
        if (out.config.has(s.key)) continue;
        if (s.fallback == nullptr)
            throw ConfigError("subcommand '" + subcommand + "' requires key '" +
                              std::string(s.key) + "'");
        if (std::string(s.fallback).empty()) continue;   // optional, no default
        out.config.values[s.key] = s.fallback;
    }

    // Derived defaults and physics validation.
    auto& v = out.config.values;
    const bool girardeau_like = subcommand == "spectrum" || subcommand == "umklapp" ||
                                subcommand == "metastability";
    if (girardeau_like || subcommand == "ness" || subcommand == "landau" ||
        subcommand == "sound") {
        const double rho = out.config.get_double("rho");
        if (!(rho > 0.0)) throw ConfigError("rho must be positive");
        if (subcommand == "spectrum" || subcommand == "umklapp") {
            const int n = out.config.get_int("N");
            if (n < 1 || n % 2 == 0)
                throw ConfigError("Girardeau runs need odd positive N, got " +
                                  std::to_string(n));
            if (!out.config.has("L")) v["L"] = fmt_full(n / rho);
            const double box = out.config.get_double("L");
            if (!(box > 0.0)) throw ConfigError("L must be positive");
            const double rho_eff = n / box;
            const auto window = girardeau::MetastabilityWindow::proposition_defaults(rho_eff);
            if (!out.config.has("c")) v["c"] = fmt_full(window.energy_cutoff);
            if (!out.config.has("d")) v["d"] = fmt_full(window.momentum_cutoff);
            // Echo the prescription for the requested velocity.
            const double v_target = out.config.get_double("v");
            const auto spec = lattice::prescription(v_target, {box});
            v["v-applied"] = fmt_full(spec.v_lattice);
            if (spec.v_lattice != v_target)
                out.warnings.push_back("requested v = " + fmt_full(v_target) +
                                       " is off-lattice; applied v = " +
                                       fmt_full(spec.v_lattice));
            if (subcommand == "umklapp" && !out.config.has("r-max"))
                v["r-max"] = std::to_string(n);
        }
        if (subcommand == "metastability") {
            const int n_max = out.config.get_int("N-max");
            if (n_max < 3) throw ConfigError("N-max must be >= 3");
            const auto window = girardeau::MetastabilityWindow::proposition_defaults(rho);
            if (!out.config.has("c")) v["c"] = fmt_full(window.energy_cutoff);
            if (!out.config.has("d")) v["d"] = fmt_full(window.momentum_cutoff);
            if (!out.config.has("v-max"))
                v["v-max"] = fmt_full(2.0 * 3.1415926535897932384626433832795 * rho);
        }
        if (subcommand == "landau" && !out.config.has("k-max"))
            v["k-max"] = fmt_full(6.0 * 3.1415926535897932384626433832795 * rho);
        if (subcommand == "sound") {
            for (double n : out.config.get_list("N-list")) {
                const int ni = static_cast<int>(std::llround(n));
                if (ni < 1 || ni % 2 == 0)
                    throw ConfigError("N-list entries must be odd positive integers");
            }
        }
    }
    if (subcommand == "landau") {
        const std::string conv = out.config.get("convention");
        if (conv != "both") girardeau::parse_convention(conv);
    }
    if (girardeau_like) {
        if (out.config.get_double("c") <= 0.0 || out.config.get_double("d") <= 0.0)
            throw ConfigError("window cutoffs c, d must be positive");
        if (out.config.get_double("budget") < 1.0)
            throw ConfigError("budget must be >= 1");
    }
    if (subcommand == "meissner") {
        const std::string units = out.config.get("units");
        if (units != "dimensionless" && units != "si")
            throw ConfigError("units must be 'dimensionless' or 'si'");
        if (out.config.has("coupling")) {
            const std::string c = out.config.get("coupling");
            if (c != "weak" && c != "strong")
                throw ConfigError("coupling preset must be 'weak' or 'strong'");
            v["n-particles"] = (c == "weak") ? "0.001" : "300";
        }
        const double r = out.config.get_double("R");
        if (!(r > 0.0)) throw ConfigError("R must be positive");
        if (out.config.get_int("R-ratio") < 2)
            throw ConfigError("R-ratio must be >= 2 (R_max >= 2R)");
        if (!out.config.has("fit-min")) v["fit-min"] = fmt_full(0.5 * r);
        if (!out.config.has("fit-max")) v["fit-max"] = fmt_full(0.95 * r);
        const double mix = out.config.get_double("mix");
        if (!(mix > 0.0 && mix <= 1.0)) throw ConfigError("mix must lie in (0, 1]");
    }
    if (subcommand == "kms") {
        const std::string demo = out.config.get("demo");
        if (demo != "all" && demo != "theorem1" && demo != "bloch" && demo != "gibbs")
            throw ConfigError("demo must be one of all|theorem1|bloch|gibbs");
        if (!(out.config.get_double("beta") > 0.0))
            throw ConfigError("beta must be positive");
    }
    return out;
}

} // namespace sflab::cli
