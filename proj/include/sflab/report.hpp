#pragma once

// Output side of the harness: CSV tables with declared headers, JSON
// reports, and the run manifest written alongside every artifact.

#include <string>
#include <vector>

#include "sflab/config.hpp"

namespace sflab::cli {

/// %.17g: round-trips doubles and is byte-stable for identical inputs.
std::string fmt_num(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    /// Comma separated, '.' decimal, header row, LF endings.
    void write(const std::string& path) const;
    std::string to_string() const;
};

struct RunManifest {
    std::string subcommand;
    Config config;                      // normalized (defaults + echoes)
    std::vector<std::string> warnings;
    std::vector<std::string> outputs;   // files written by the run
    std::vector<std::pair<std::string, std::string>> notes;
    double wall_time_ms = 0.0;

    std::string to_json() const;
    void write(const std::string& path) const;
};

inline constexpr const char* kToolName = "sflab";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace sflab::cli
