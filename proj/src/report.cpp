#include "sflab/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sflab::cli {

std::string fmt_num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size())
        throw std::logic_error("CSV row width does not match the header");
    rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
    std::string out;
    auto append_line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    append_line(header);
    for (const auto& row : rows) append_line(row);
    return out;
}

void CsvTable::write(const std::string& path) const {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path);
    file << to_string();
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["config"] = config.values;
    j["warnings"] = warnings;
    j["outputs"] = outputs;
    nlohmann::json notes_json = nlohmann::json::object();
    for (const auto& [k, v] : notes) notes_json[k] = v;
    j["notes"] = notes_json;
    j["wall_time_ms"] = wall_time_ms;
    return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path);
    file << to_json();
}

} // namespace sflab::cli
